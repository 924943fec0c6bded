//! Exhaustive search for admissible degree-3 covers.
//!
//! A cover is admissible when its generator actions satisfy the two
//! commutation relators, leave sheet 1 fixed around the invisible wires, and
//! move sheet 1 around every edge along an exterior linking path.

use serde::Serialize;

use crate::group::{CoverSpec, Generator, Perm3};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstraintReport {
    pub relator_ok: bool,
    pub invisible_ok: bool,
    pub wetting_ok: bool,
    pub failed_items: Vec<String>,
}

impl ConstraintReport {
    pub fn is_valid(&self) -> bool {
        self.relator_ok && self.invisible_ok && self.wetting_ok
    }
}

/// Which sheets a wetting product has to move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WettingMode {
    /// The product must move sheet 1.
    #[default]
    Weak,
    /// The product must be a derangement.
    Strong,
}

fn relator_items(spec: &CoverSpec) -> [(&'static str, bool); 2] {
    let s = |g| spec.get(g);
    [
        ("ab=ba", s(Generator::A).commutes_with(s(Generator::B))),
        ("de=ed", s(Generator::D).commutes_with(s(Generator::E))),
    ]
}

pub fn relator_consistent(spec: &CoverSpec) -> bool {
    relator_items(spec).iter().all(|(_, ok)| *ok)
}

fn wire_safe(p: Perm3) -> bool {
    p == Perm3::IDENTITY || p == Perm3::T23
}

pub fn invisible_wire_ok(spec: &CoverSpec) -> bool {
    wire_safe(spec.get(Generator::A)) && wire_safe(spec.get(Generator::E))
}

/// The six edge-loop products along exterior linking paths, with their names.
pub fn wetting_products(spec: &CoverSpec) -> [(&'static str, Perm3); 6] {
    let a = spec.get(Generator::A);
    let b = spec.get(Generator::B);
    let c = spec.get(Generator::C);
    let d = spec.get(Generator::D);
    let e = spec.get(Generator::E);
    let ci = c.inverse();
    [
        ("c", c),
        ("c'd", ci * d),
        ("bc'", b * ci),
        ("bc'd", b * ci * d),
        ("ad'ca'c'", a * d.inverse() * c * a.inverse() * ci),
        ("bc'ece'", b * ci * e * c * e.inverse()),
    ]
}

fn wets(p: Perm3, mode: WettingMode) -> bool {
    match mode {
        WettingMode::Weak => !p.fixes(1),
        WettingMode::Strong => p.is_derangement(),
    }
}

pub fn wetting_ok_with(spec: &CoverSpec, mode: WettingMode) -> bool {
    wetting_products(spec).iter().all(|(_, p)| wets(*p, mode))
}

pub fn wetting_ok(spec: &CoverSpec) -> bool {
    wetting_ok_with(spec, WettingMode::Weak)
}

pub fn check_constraints(spec: &CoverSpec, mode: WettingMode) -> ConstraintReport {
    let mut failed_items = Vec::new();
    for (name, ok) in relator_items(spec) {
        if !ok {
            failed_items.push(format!("relator {name}"));
        }
    }
    for g in [Generator::A, Generator::E] {
        if !wire_safe(spec.get(g)) {
            failed_items.push(format!("invisible wire {}", g.symbol()));
        }
    }
    for (name, p) in wetting_products(spec) {
        if !wets(p, mode) {
            failed_items.push(format!("wetting {name}"));
        }
    }
    ConstraintReport {
        relator_ok: relator_consistent(spec),
        invisible_ok: invisible_wire_ok(spec),
        wetting_ok: wetting_ok_with(spec, mode),
        failed_items,
    }
}

/// All 6^5 assignments in lexicographic order over [`Perm3::ALL`], `σ_a`
/// varying slowest.
pub fn all_specs() -> impl Iterator<Item = CoverSpec> {
    (0..6usize.pow(5)).map(|mut idx| {
        let mut sigma = [Perm3::IDENTITY; 5];
        for slot in sigma.iter_mut().rev() {
            *slot = Perm3::ALL[idx % 6];
            idx /= 6;
        }
        CoverSpec { sigma }
    })
}

pub fn enumerate_valid_covers_with(mode: WettingMode) -> Vec<CoverSpec> {
    all_specs()
        .filter(|s| relator_consistent(s) && invisible_wire_ok(s) && wetting_ok_with(s, mode))
        .collect()
}

pub fn enumerate_valid_covers() -> Vec<CoverSpec> {
    enumerate_valid_covers_with(WettingMode::Weak)
}
