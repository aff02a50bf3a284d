//! CSS probe codes: GHZ, toric (square and honeycomb) and Bacon-Shor.
//!
//! Qubit numbering is row-major over unit cells, cell `(x, y)` having index
//! `y * lx + x`, followed by the edge index inside the cell:
//!
//! * square torus: edge 0 is horizontal `(x,y)-(x+1,y)`, edge 1 is vertical
//!   `(x,y)-(x,y+1)`; vertex checks are indexed by cell, plaquettes by their
//!   lower-left cell.
//! * honeycomb torus: each cell holds an A and a B vertex (checks `2c` and
//!   `2c+1`); edge 0 joins A(x,y)-B(x,y), edge 1 joins A(x,y)-B(x-1,y) and edge 2
//!   joins A(x,y)-B(x,y-1). Hexagon `c` is the face to the lower right of A(c).
//! * Bacon-Shor: qubit `(i, j)` (row `i < m`, column `j < n`) is `i * n + j`.
//!
//! All lattices are periodic in every direction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{self, RowBasis};
use crate::support::{overlap_parity, Support};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Ghz,
    ToricSquare,
    ToricHoneycomb,
    BaconShor,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Ghz => "ghz",
            Family::ToricSquare => "toric_square",
            Family::ToricHoneycomb => "toric_honeycomb",
            Family::BaconShor => "bacon_shor",
        }
    }

    pub fn is_toric(self) -> bool {
        matches!(self, Family::ToricSquare | Family::ToricHoneycomb)
    }
}

/// Pauli type of a stabilizer sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    X,
    Z,
}

impl Sector {
    pub fn other(self) -> Sector {
        match self {
            Sector::X => Sector::Z,
            Sector::Z => Sector::X,
        }
    }
}

/// Family together with its size parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CodeParams {
    Ghz {
        n: usize,
    },
    ToricSquare {
        lx: usize,
        ly: usize,
    },
    /// Crossing the `y` boundary upward shifts `x` by `twist` cells.
    ToricHoneycomb {
        lx: usize,
        ly: usize,
        #[serde(default)]
        twist: usize,
    },
    BaconShor {
        m: usize,
        n: usize,
    },
}

impl CodeParams {
    /// Untwisted honeycomb torus.
    pub fn honeycomb(lx: usize, ly: usize) -> Self {
        CodeParams::ToricHoneycomb { lx, ly, twist: 0 }
    }

    pub fn family(&self) -> Family {
        match self {
            CodeParams::Ghz { .. } => Family::Ghz,
            CodeParams::ToricSquare { .. } => Family::ToricSquare,
            CodeParams::ToricHoneycomb { .. } => Family::ToricHoneycomb,
            CodeParams::BaconShor { .. } => Family::BaconShor,
        }
    }

    /// The two size parameters with their conventional names.
    pub fn dims(&self) -> [(&'static str, usize); 2] {
        match *self {
            CodeParams::Ghz { n } => [("n", n), ("n_z", n)],
            CodeParams::ToricSquare { lx, ly } | CodeParams::ToricHoneycomb { lx, ly, .. } => {
                [("lx", lx), ("ly", ly)]
            }
            CodeParams::BaconShor { m, n } => [("m", m), ("n", n)],
        }
    }
}

/// Stabilizer supports of a CSS code, split into the imprinter sector (summed
/// into the phase generator) and the correction sector (measured for partial
/// error correction).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerGroup {
    params: CodeParams,
    n_qubits: usize,
    sx: Vec<Support>,
    sz: Vec<Support>,
    imprinter: Sector,
}

impl StabilizerGroup {
    pub fn params(&self) -> CodeParams {
        self.params
    }

    pub fn family(&self) -> Family {
        self.params.family()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn sx(&self) -> &[Support] {
        &self.sx
    }

    pub fn sz(&self) -> &[Support] {
        &self.sz
    }

    pub fn imprinter_sector(&self) -> Sector {
        self.imprinter
    }

    pub fn correction_sector(&self) -> Sector {
        self.imprinter.other()
    }

    pub fn checks(&self, sector: Sector) -> &[Support] {
        match sector {
            Sector::X => &self.sx,
            Sector::Z => &self.sz,
        }
    }

    pub fn imprinter_checks(&self) -> &[Support] {
        self.checks(self.imprinter)
    }

    pub fn correction_checks(&self) -> &[Support] {
        self.checks(self.correction_sector())
    }

    /// Number of imprinter stabilizers, `N_Z` for the toric and GHZ probes.
    pub fn n_imprinters(&self) -> usize {
        self.imprinter_checks().len()
    }

    /// Weight `l` of the imprinter stabilizers (the largest, if they differ).
    pub fn stabilizer_weight(&self) -> usize {
        self.imprinter_checks().iter().map(Support::weight).max().unwrap_or(0)
    }
}

/// A CSS code prepared as a metrology probe: its stabilizers plus the readout
/// symmetry operator `tx`, of the correction sector's Pauli type, with odd
/// overlap with every imprinter stabilizer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CssCode {
    group: StabilizerGroup,
    tx: Support,
}

impl std::ops::Deref for CssCode {
    type Target = StabilizerGroup;

    fn deref(&self) -> &StabilizerGroup {
        &self.group
    }
}

impl CssCode {
    pub fn group(&self) -> &StabilizerGroup {
        &self.group
    }

    pub fn tx(&self) -> &Support {
        &self.tx
    }

    /// Serializable description with qubit index lists.
    pub fn describe(&self) -> CodeDescription {
        let list = |v: &[Support]| v.iter().map(|s| s.indices().collect()).collect();
        CodeDescription {
            family: self.family(),
            params: self.params,
            n_qubits: self.n_qubits,
            imprinter_sector: self.imprinter,
            sx: list(&self.sx),
            sz: list(&self.sz),
            tx: self.tx.indices().collect(),
            logicals: list(&logical_generators(self).generators),
        }
    }
}

/// JSON shape of a code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeDescription {
    pub family: Family,
    pub params: CodeParams,
    pub n_qubits: usize,
    pub imprinter_sector: Sector,
    pub sx: Vec<Vec<usize>>,
    pub sz: Vec<Vec<usize>>,
    pub tx: Vec<usize>,
    pub logicals: Vec<Vec<usize>>,
}

/// Generators of the logical classes seen by partial correction.
///
/// Each generator has the correction sector's Pauli type, commutes with every
/// imprinter stabilizer and lies outside the correction stabilizer group. A
/// syndrome-free residual is logical iff it has odd overlap with some
/// generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalSet {
    pub generators: Vec<Support>,
    pub imprinter_rank: usize,
}

impl LogicalSet {
    /// True when `residual` flips the outcome of some logical generator.
    pub fn detects(&self, residual: &Support) -> bool {
        self.generators.iter().any(|g| g.parity_unchecked(residual))
    }
}

fn wrap(v: usize, dv: isize, len: usize) -> usize {
    (v as isize + dv).rem_euclid(len as isize) as usize
}

fn square_torus(lx: usize, ly: usize) -> (usize, Vec<Support>, Vec<Support>) {
    let n = 2 * lx * ly;
    let cell = |x: usize, y: usize| y * lx + x;
    let h = |x: usize, y: usize| 2 * cell(x, y);
    let v = |x: usize, y: usize| 2 * cell(x, y) + 1;
    let mut stars = Vec::with_capacity(lx * ly);
    let mut plaquettes = Vec::with_capacity(lx * ly);
    for y in 0..ly {
        for x in 0..lx {
            stars.push(Support::from_indices(
                n,
                [h(x, y), h(wrap(x, -1, lx), y), v(x, y), v(x, wrap(y, -1, ly))],
            ));
            plaquettes.push(Support::from_indices(
                n,
                [h(x, y), h(x, wrap(y, 1, ly)), v(x, y), v(wrap(x, 1, lx), y)],
            ));
        }
    }
    (n, stars, plaquettes)
}

fn honeycomb_torus(lx: usize, ly: usize, twist: usize) -> (usize, Vec<Support>, Vec<Support>) {
    let n = 3 * lx * ly;
    let (lxi, lyi) = (lx as isize, ly as isize);
    let e = |k: usize, x: isize, y: isize| {
        let turns = y.div_euclid(lyi);
        let x = (x + turns * twist as isize).rem_euclid(lxi) as usize;
        3 * (y.rem_euclid(lyi) as usize * lx + x) + k
    };
    let mut vertices = Vec::with_capacity(2 * lx * ly);
    let mut hexagons = Vec::with_capacity(lx * ly);
    for y in 0..lyi {
        for x in 0..lxi {
            // A(x,y) then B(x,y)
            vertices.push(Support::from_indices(n, [e(0, x, y), e(1, x, y), e(2, x, y)]));
            vertices.push(Support::from_indices(n, [e(0, x, y), e(1, x + 1, y), e(2, x, y + 1)]));
            hexagons.push(Support::from_indices(
                n,
                [
                    e(0, x, y),
                    e(1, x + 1, y),
                    e(2, x + 1, y),
                    e(0, x + 1, y - 1),
                    e(1, x + 1, y - 1),
                    e(2, x, y),
                ],
            ));
        }
    }
    (n, vertices, hexagons)
}

fn bacon_shor(m: usize, n: usize) -> (usize, Vec<Support>, Vec<Support>) {
    let nq = m * n;
    let q = |i: usize, j: usize| i * n + j;
    let sx = (0..m)
        .map(|i| {
            let next = (i + 1) % m;
            Support::from_indices(nq, (0..n).flat_map(|j| [q(i, j), q(next, j)]))
        })
        .collect();
    let sz = (0..m)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| Support::from_indices(nq, [q(i, j), q(i, (j + 1) % n)]))
        .collect();
    (nq, sx, sz)
}

/// A support with odd overlap with every row of `imprinter`, found by GF(2)
/// elimination with lowest-index pivots.
pub fn solve_symmetry_operator(imprinter: &[Support], n_qubits: usize) -> Result<Support> {
    let rhs = vec![true; imprinter.len()];
    gf2::solve(imprinter, &rhs, n_qubits).ok_or_else(|| {
        Error::UnsolvableSymmetry(format!(
            "no pattern has odd overlap with all {} imprinter stabilizers",
            imprinter.len()
        ))
    })
}

/// Prefers a solution that is also even on every correction check (a closed
/// loop on the toric lattices), falling back to the imprinter-only system.
fn choose_symmetry_operator(
    imprinter: &[Support],
    correction: &[Support],
    n_qubits: usize,
) -> Result<Support> {
    let rows: Vec<Support> = imprinter.iter().chain(correction).cloned().collect();
    let rhs: Vec<bool> = std::iter::repeat_n(true, imprinter.len())
        .chain(std::iter::repeat_n(false, correction.len()))
        .collect();
    match gf2::solve(&rows, &rhs, n_qubits) {
        Some(x) => Ok(x),
        None => solve_symmetry_operator(imprinter, n_qubits),
    }
}

/// Builds the stabilizer supports without looking for a symmetry operator.
pub fn build_stabilizers(params: CodeParams) -> Result<StabilizerGroup> {
    let (n_qubits, sx, sz, imprinter) = match params {
        CodeParams::Ghz { n } => {
            if n < 2 {
                return Err(Error::InvalidParams(format!("GHZ needs N >= 2, got {n}")));
            }
            let sz = (0..n).map(|q| Support::from_indices(n, [q])).collect();
            (n, Vec::new(), sz, Sector::Z)
        }
        CodeParams::ToricSquare { lx, ly } | CodeParams::ToricHoneycomb { lx, ly, .. } => {
            if lx == 0 || ly == 0 {
                return Err(Error::InvalidParams(format!("torus needs positive sizes, got {lx}x{ly}")));
            }
            let (n, stars, faces) = match params {
                CodeParams::ToricHoneycomb { twist, .. } => honeycomb_torus(lx, ly, twist),
                _ => square_torus(lx, ly),
            };
            (n, stars, faces, Sector::Z)
        }
        CodeParams::BaconShor { m, n } => {
            if m < 2 || n < 1 {
                return Err(Error::InvalidParams(format!("Bacon-Shor needs m >= 2 and n >= 1, got {m}x{n}")));
            }
            let (nq, sx, sz) = bacon_shor(m, n);
            (nq, sx, sz, Sector::X)
        }
    };
    Ok(StabilizerGroup { params, n_qubits, sx, sz, imprinter })
}

pub fn build_code(params: CodeParams) -> Result<CssCode> {
    let group = build_stabilizers(params)?;
    let n_qubits = group.n_qubits();
    let tx = match params {
        // Z on the first column of every other row; needs an even row count.
        CodeParams::BaconShor { m, n } if m % 2 == 0 => {
            Support::from_indices(n_qubits, (0..m).step_by(2).map(|i| i * n))
        }
        CodeParams::BaconShor { .. } => solve_symmetry_operator(group.imprinter_checks(), n_qubits)?,
        _ => choose_symmetry_operator(group.imprinter_checks(), group.correction_checks(), n_qubits)?,
    };
    Ok(CssCode { group, tx })
}

/// Logical generators: kernel of the imprinter checks modulo the span of the
/// correction checks.
pub fn logical_generators(code: &StabilizerGroup) -> LogicalSet {
    let imp = code.imprinter_checks();
    let mut generators = gf2::quotient_basis(imp, code.correction_checks(), code.n_qubits());
    shorten(&mut generators, code.correction_checks());
    generators.sort_by_key(|g| (g.weight(), g.first_one()));
    LogicalSet { generators, imprinter_rank: RowBasis::from_rows(code.n_qubits(), imp).rank() }
}

/// Greedy weight reduction by correction checks and other generators; each
/// step is invertible on the quotient, so the classes stay a basis.
fn shorten(generators: &mut [Support], checks: &[Support]) {
    loop {
        let mut changed = false;
        for i in 0..generators.len() {
            let others: Vec<Support> =
                generators.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, g)| g.clone()).collect();
            for h in checks.iter().chain(&others) {
                let candidate = generators[i].xor(h);
                if candidate.weight() < generators[i].weight() {
                    generators[i] = candidate;
                    changed = true;
                }
            }
        }
        if !changed {
            return;
        }
    }
}

/// Checks the CSS and symmetry-operator invariants; returns a description of
/// the first violation.
pub fn verify_code(code: &CssCode) -> std::result::Result<(), String> {
    for (i, a) in code.sx().iter().enumerate() {
        for (j, b) in code.sz().iter().enumerate() {
            if overlap_parity(a, b).map_err(|e| e.to_string())? {
                return Err(format!("sx[{i}] anticommutes with sz[{j}]"));
            }
        }
    }
    for (i, s) in code.imprinter_checks().iter().enumerate() {
        if !overlap_parity(code.tx(), s).map_err(|e| e.to_string())? {
            return Err(format!("tx has even overlap with imprinter check {i}"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weights(v: &[Support]) -> Vec<usize> {
        let mut w: Vec<usize> = v.iter().map(Support::weight).collect();
        w.sort_unstable();
        w
    }

    fn xor_all(v: &[Support], n: usize) -> Support {
        v.iter().fold(Support::zeros(n), |acc, s| acc.xor(s))
    }

    #[test]
    fn ghz_four() {
        let code = build_code(CodeParams::Ghz { n: 4 }).unwrap();
        assert_eq!(code.n_qubits(), 4);
        assert_eq!(code.sz().len(), 4);
        assert!(code.sx().is_empty());
        assert!(code.sz().iter().all(|s| s.weight() == 1));
        assert_eq!(*code.tx(), Support::ones(4));
    }

    #[test]
    fn square_two_by_four() {
        let code = build_code(CodeParams::ToricSquare { lx: 2, ly: 4 }).unwrap();
        assert_eq!(code.n_qubits(), 16);
        assert_eq!(weights(code.sz()), vec![4; 8]);
        assert_eq!(weights(code.sx()), vec![4; 8]);
        assert_eq!(code.stabilizer_weight(), 4);
        verify_code(&code).unwrap();
    }

    #[test]
    fn honeycomb_counts() {
        let code = build_code(CodeParams::honeycomb(3, 4)).unwrap();
        assert_eq!(code.n_qubits(), 36);
        assert_eq!(weights(code.sz()), vec![6; 12]);
        assert_eq!(weights(code.sx()), vec![3; 24]);
        verify_code(&code).unwrap();
    }

    #[test]
    fn bacon_shor_four_by_four() {
        let code = build_code(CodeParams::BaconShor { m: 4, n: 4 }).unwrap();
        assert_eq!(code.n_qubits(), 16);
        assert_eq!(weights(code.sx()), vec![8; 4]);
        assert_eq!(weights(code.sz()), vec![2; 16]);
        assert_eq!(code.imprinter_sector(), Sector::X);
        assert_eq!(code.tx().indices().collect::<Vec<_>>(), vec![0, 8]);
        verify_code(&code).unwrap();
    }

    #[test]
    fn torus_plaquettes_sum_to_zero() {
        for params in [
            CodeParams::ToricSquare { lx: 3, ly: 4 },
            CodeParams::ToricSquare { lx: 2, ly: 2 },
            CodeParams::honeycomb(2, 3),
            CodeParams::honeycomb(4, 4),
        ] {
            let code = build_code(params).unwrap();
            assert!(xor_all(code.sz(), code.n_qubits()).is_zero(), "{params:?}");
            assert!(xor_all(code.sx(), code.n_qubits()).is_zero(), "{params:?}");
        }
    }

    #[test]
    fn toric_symmetry_operator_is_a_closed_loop() {
        for params in [
            CodeParams::ToricSquare { lx: 2, ly: 4 },
            CodeParams::ToricSquare { lx: 4, ly: 4 },
            CodeParams::ToricSquare { lx: 3, ly: 2 },
        ] {
            let code = build_code(params).unwrap();
            for s in code.correction_checks() {
                assert!(!overlap_parity(code.tx(), s).unwrap());
            }
        }
    }

    #[test]
    fn odd_plaquette_count_has_no_symmetry_operator() {
        let err = build_code(CodeParams::ToricSquare { lx: 1, ly: 3 }).unwrap_err();
        assert!(matches!(err, Error::UnsolvableSymmetry(_)));
        let err = build_code(CodeParams::honeycomb(3, 3)).unwrap_err();
        assert!(matches!(err, Error::UnsolvableSymmetry(_)));
        let err = build_code(CodeParams::BaconShor { m: 3, n: 3 }).unwrap_err();
        assert!(matches!(err, Error::UnsolvableSymmetry(_)));
        // the stabilizers alone are still available
        let group = build_stabilizers(CodeParams::honeycomb(3, 3)).unwrap();
        assert_eq!(group.n_imprinters(), 9);
    }

    #[test]
    fn solver_on_ghz_singletons_gives_all_ones() {
        let rows: Vec<Support> = (0..5).map(|q| Support::from_indices(5, [q])).collect();
        assert_eq!(solve_symmetry_operator(&rows, 5).unwrap(), Support::ones(5));
    }

    #[test]
    fn solver_on_square_plaquettes() {
        let (n, _, plaquettes) = square_torus(2, 4);
        let x = solve_symmetry_operator(&plaquettes, n).unwrap();
        for p in &plaquettes {
            assert!(overlap_parity(&x, p).unwrap());
        }
        let (n, _, plaquettes) = square_torus(1, 3);
        assert!(matches!(solve_symmetry_operator(&plaquettes, n), Err(Error::UnsolvableSymmetry(_))));
    }

    #[test]
    fn invalid_params() {
        assert!(matches!(build_code(CodeParams::Ghz { n: 1 }), Err(Error::InvalidParams(_))));
        assert!(matches!(build_code(CodeParams::ToricSquare { lx: 0, ly: 2 }), Err(Error::InvalidParams(_))));
        assert!(matches!(build_code(CodeParams::BaconShor { m: 1, n: 4 }), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn adjacent_plaquettes_share_one_edge() {
        let code = build_code(CodeParams::ToricSquare { lx: 3, ly: 4 }).unwrap();
        // plaquettes (0,0) and (1,0) share the vertical edge of cell (1,0)
        let a = &code.sz()[0];
        let b = &code.sz()[1];
        assert_eq!(a.overlap(b), 1);
        assert!(overlap_parity(a, b).unwrap());
    }

    #[test]
    fn logical_generators_square_stripe() {
        let code = build_code(CodeParams::ToricSquare { lx: 2, ly: 4 }).unwrap();
        let logicals = logical_generators(&code);
        assert_eq!(weights(&logicals.generators), vec![2, 4]);
        assert_eq!(logicals.imprinter_rank, 7);
    }

    #[test]
    fn logical_generators_honeycomb_eighteen() {
        for (lx, ly) in [(2, 3), (3, 2)] {
            let code = build_code(CodeParams::honeycomb(lx, ly)).unwrap();
            assert_eq!(code.n_qubits(), 18);
            let logicals = logical_generators(&code);
            assert_eq!(weights(&logicals.generators), vec![2, 3], "{lx}x{ly}");
        }
    }

    #[test]
    fn logical_generators_are_valid() {
        for params in [
            CodeParams::Ghz { n: 5 },
            CodeParams::ToricSquare { lx: 3, ly: 4 },
            CodeParams::honeycomb(2, 4),
            CodeParams::BaconShor { m: 4, n: 3 },
        ] {
            let code = build_code(params).unwrap();
            let logicals = logical_generators(&code);
            let stabilizers = RowBasis::from_rows(code.n_qubits(), code.correction_checks());
            for g in &logicals.generators {
                for s in code.imprinter_checks() {
                    assert!(!overlap_parity(g, s).unwrap());
                }
                assert!(!stabilizers.contains(g));
            }
            let expected = match params.family() {
                Family::Ghz => 0,
                Family::BaconShor => 1,
                _ => 2,
            };
            assert_eq!(logicals.generators.len(), expected, "{params:?}");
        }
    }

    #[test]
    fn build_is_deterministic() {
        let p = CodeParams::honeycomb(2, 3);
        assert_eq!(build_code(p).unwrap(), build_code(p).unwrap());
    }

    #[test]
    fn description_serializes() {
        let code = build_code(CodeParams::Ghz { n: 3 }).unwrap();
        let json = serde_json::to_value(code.describe()).unwrap();
        assert_eq!(json["family"], "ghz");
        assert_eq!(json["n_qubits"], 3);
        assert_eq!(json["tx"], serde_json::json!([0, 1, 2]));
        assert_eq!(json["sz"], serde_json::json!([[0], [1], [2]]));
        assert_eq!(json["logicals"], serde_json::json!([]));
        let back: CodeDescription = serde_json::from_value(json).unwrap();
        assert_eq!(back, code.describe());
    }
}
