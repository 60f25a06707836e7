//! End-to-end reproduction tables: kappa across the twisted families,
//! Thurston-Bennequin values from fronts, and the contact-surgery gap
//! report, with markdown and JSON renderings.
