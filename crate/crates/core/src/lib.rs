//! exact computation in the homotopy theory of finite-dimensional algebras:
//! bar resolutions relative to a split semisimple subalgebra, Yoneda hom
//! complexes, noncommutative 1-forms, singular Yoneda categories and
//! stabilization windows, all over prime fields or the rationals.

pub mod linalg;
pub mod algebra;
pub mod homalg;
pub mod bar;
pub mod yoneda;
pub mod ncforms;
pub mod singyoneda;
pub mod stabilization;
pub mod samples;
