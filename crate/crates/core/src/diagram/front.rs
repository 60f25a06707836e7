//! Combinatorial Legendrian fronts.
//!
//! A front is read left to right as a sequence of events on horizontal
//! strands, numbered from the top starting at 0. At a crossing the strand
//! descending from position `at` to `at+1` has the smaller slope and hence
//! lies in front; converting to a diagram it becomes the over-strand. The
//! Thurston-Bennequin number of the front is w(F) - c(F), the writhe of the
//! underlying diagram minus half the number of cusps.

use super::builder::{Cross, MorseBuilder};
use super::pd::{DiagramError, PlanarDiagram};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrontEvent {
    /// two new strands open at positions `at`, `at+1`
    LeftCusp { at: usize },
    /// the strands at positions `at`, `at+1` close up
    RightCusp { at: usize },
    /// the strands at positions `at`, `at+1` cross
    Crossing { at: usize },
}

#[derive(Debug, Clone)]
pub struct FrontDiagram {
    events: Vec<FrontEvent>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FrontError {
    #[error("event {0} acts at position {1} but only {2} strands are open")]
    Position(usize, usize, usize),
    #[error("front leaves {0} strands open")]
    Open(usize),
    #[error("front has no events")]
    Empty,
    #[error("front is not a valid diagram: {0}")]
    Diagram(#[from] DiagramError),
}

impl FrontDiagram {
    pub fn new(events: Vec<FrontEvent>) -> Result<FrontDiagram, FrontError> {
        if events.is_empty() {
            return Err(FrontError::Empty);
        }
        let mut open = 0usize;
        for (i, ev) in events.iter().enumerate() {
            match *ev {
                FrontEvent::LeftCusp { at } => {
                    if at > open {
                        return Err(FrontError::Position(i, at, open));
                    }
                    open += 2;
                }
                FrontEvent::RightCusp { at } | FrontEvent::Crossing { at } => {
                    if at + 1 >= open {
                        return Err(FrontError::Position(i, at, open));
                    }
                    if let FrontEvent::RightCusp { .. } = ev {
                        open -= 2;
                    }
                }
            }
        }
        if open != 0 {
            return Err(FrontError::Open(open));
        }
        Ok(FrontDiagram { events })
    }

    pub fn events(&self) -> &[FrontEvent] {
        &self.events
    }

    pub fn cusp_half_count(&self) -> i32 {
        self.events
            .iter()
            .filter(|e| matches!(e, FrontEvent::LeftCusp { .. }))
            .count() as i32
    }

    pub fn crossing_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, FrontEvent::Crossing { .. }))
            .count()
    }

    /// The underlying smooth diagram: rotate the front a quarter turn so it
    /// reads bottom-to-top; every front crossing resolves with the descending
    /// strand (entering from the left after rotation) on top.
    pub fn to_diagram(&self) -> Result<PlanarDiagram, DiagramError> {
        let mut b = MorseBuilder::new();
        for ev in &self.events {
            match *ev {
                FrontEvent::LeftCusp { at } => b.cup(at),
                FrontEvent::RightCusp { at } => b.cap(at),
                FrontEvent::Crossing { at } => b.cross(at, Cross::LeftOver),
            }
        }
        b.finish(&[], 0)
    }

    pub fn writhe(&self) -> Result<i32, DiagramError> {
        Ok(self.to_diagram()?.writhe())
    }
}

/// tb(F) = w(F) - c(F).
pub fn front_tb(front: &FrontDiagram) -> Result<i32, DiagramError> {
    Ok(front.writhe()? - front.cusp_half_count())
}

/// Legendrian front for the twisted family member with tb = -2 - n.
pub fn build_front_kn(n: i64) -> Result<FrontDiagram, FrontError> {
    assert!(n >= 0, "front defined for n >= 0");
    use FrontEvent::*;
    let mut ev = vec![LeftCusp { at: 0 }];
    for _ in 0..=n {
        ev.push(LeftCusp { at: 1 });
        ev.push(RightCusp { at: 2 });
    }
    ev.push(RightCusp { at: 0 });
    FrontDiagram::new(ev)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flying_saucer() {
        let f = FrontDiagram::new(vec![
            FrontEvent::LeftCusp { at: 0 },
            FrontEvent::RightCusp { at: 0 },
        ])
        .unwrap();
        assert_eq!(front_tb(&f).unwrap(), -1);
    }

    #[test]
    fn unbalanced_front_rejected() {
        let err = FrontDiagram::new(vec![FrontEvent::LeftCusp { at: 0 }]).unwrap_err();
        assert_eq!(err, FrontError::Open(2));
    }

    #[test]
    fn stabilization_drops_tb() {
        // saucer with one zigzag
        let f = FrontDiagram::new(vec![
            FrontEvent::LeftCusp { at: 0 },
            FrontEvent::LeftCusp { at: 1 },
            FrontEvent::RightCusp { at: 0 },
            FrontEvent::RightCusp { at: 0 },
        ])
        .unwrap();
        assert_eq!(front_tb(&f).unwrap(), -2);
    }
}
