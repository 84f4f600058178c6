//! the built-in test algebras used across the suites and by the verifier.

use crate::algebra::{load_algebra, Algebra};
use crate::linalg::FieldSpec;

fn build(field: FieldSpec, body: &str) -> Algebra {
    let src = format!("[field]\ncharacteristic = {}\n{}", field.characteristic, body);
    load_algebra(&src).expect("built-in algebra")
}

/// k[x]/(x^2), local, self-injective.
pub fn dual_numbers(field: FieldSpec) -> Algebra {
    build(
        field,
        "[basis]\nidempotents = one\nelement x : one one\n[structure]\nx * x = 0\n",
    )
}

/// k[x]/(x^3), local, self-injective, with 2-periodic syzygies of k.
pub fn kx3(field: FieldSpec) -> Algebra {
    build(
        field,
        "[basis]\nidempotents = one\nelement x : one one\nelement x2 : one one\n[structure]\nx * x = x2\n",
    )
}

/// the A2 path algebra: two vertices, one arrow, hereditary.
pub fn a2(field: FieldSpec) -> Algebra {
    build(
        field,
        "[quiver]\nvertices = v1 v2\narrow a : v1 -> v2\nmaxlen = 4\n",
    )
}

/// k[x,y]/(x^2, xy, y^2): commutative local, 3-dimensional, not Gorenstein.
pub fn kxy(field: FieldSpec) -> Algebra {
    build(
        field,
        "[basis]\nidempotents = one\nelement x : one one\nelement y : one one\n[structure]\nx * x = 0\nx * y = 0\ny * x = 0\ny * y = 0\n",
    )
}

/// self-injective Nakayama algebra: cyclic quiver on two vertices with all
/// paths of length two killed.
pub fn nakayama(field: FieldSpec) -> Algebra {
    build(
        field,
        "[quiver]\nvertices = v1 v2\narrow a : v1 -> v2\narrow b : v2 -> v1\nrelation a*b\nrelation b*a\nmaxlen = 4\n",
    )
}

/// all five test algebras in a fixed order.
pub fn all(field: FieldSpec) -> Vec<Algebra> {
    vec![
        dual_numbers(field),
        kx3(field),
        a2(field),
        kxy(field),
        nakayama(field),
    ]
}

/// the per-algebra names matching `all`.
pub fn names() -> Vec<&'static str> {
    vec!["k[x]/(x^2)", "k[x]/(x^3)", "A2", "k[x,y]/(x^2,xy,y^2)", "nakayama"]
}
