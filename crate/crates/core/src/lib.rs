//! Intersections of S-arithmetic sets with finitely generated subgroups of
//! finitely generated abelian groups.

pub mod index;
pub mod intlinalg;
pub mod lrs;
pub mod sarith;
pub mod expo;
pub mod oracle;
pub mod pipeline;
