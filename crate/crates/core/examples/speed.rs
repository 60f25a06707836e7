use std::time::Instant;
use tbwb_core::diagram::braid_closure;
use tbwb_core::khovanov::{collapse, khovanov_homology_scan};

fn main() {
    // T(2,31): 31 crossings
    let t0 = Instant::now();
    let d = braid_closure(2, &vec![1; 31]).unwrap();
    let h = khovanov_homology_scan(&d).unwrap();
    println!("T(2,31): dim {} kappa {:?} in {:?}", h.total_dim(), collapse(&h).kappa(), t0.elapsed());

    // a fatter 4-strand braid, 24 crossings
    let t0 = Instant::now();
    let word: Vec<i32> = (0..24).map(|i| [1, 2, 3, -2][(i % 4) as usize]).collect();
    let d = braid_closure(4, &word).unwrap();
    let h = khovanov_homology_scan(&d).unwrap();
    println!("4-braid 24x: dim {} kappa {:?} in {:?}", h.total_dim(), collapse(&h).kappa(), t0.elapsed());

    // (-2,3,7) pretzel
    let t0 = Instant::now();
    let d = tbwb_core::diagram::pretzel(-2, 3, 7).unwrap();
    let h = khovanov_homology_scan(&d).unwrap();
    println!("P(-2,3,7): dim {} kappa {:?} in {:?}", h.total_dim(), collapse(&h).kappa(), t0.elapsed());
}
