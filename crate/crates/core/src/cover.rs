//! Eigensheaf degrees for a (Z/nZ)²-cover of P¹ branched over {0, 1, ∞}.
//!
//! Every direct-image summand is a line bundle on P¹, so it is described by
//! its degree alone. The general routes (building-bundle degrees, the
//! canonical twist by ω_{P¹}, and the δ-count for the bicanonical summand)
//! are kept separate from the closed-form piecewise rules so that each can
//! be checked against the other.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Character, GroupElement, GroupModulus};

/// The three branch points, in the order 0, 1, ∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BranchPoint {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "inf")]
    Infinity,
}

impl BranchPoint {
    pub const ALL: [BranchPoint; 3] = [BranchPoint::Zero, BranchPoint::One, BranchPoint::Infinity];

    pub fn index(self) -> usize {
        match self {
            BranchPoint::Zero => 0,
            BranchPoint::One => 1,
            BranchPoint::Infinity => 2,
        }
    }
}

impl fmt::Display for BranchPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BranchPoint::Zero => "0",
            BranchPoint::One => "1",
            BranchPoint::Infinity => "∞",
        })
    }
}

/// Degree of a line bundle on P¹.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EigensheafDegree(pub i64);

impl EigensheafDegree {
    /// h⁰(O(d)) = max(0, d + 1).
    pub fn h0(self) -> u64 {
        (self.0 + 1).max(0) as u64
    }
}

pub fn h0_eigensheaf(d: EigensheafDegree) -> u64 {
    d.h0()
}

/// Modulus plus local monodromies (g_0, g_1, g_∞) with g_0 + g_1 + g_∞ = 0
/// generating G.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleCoverData {
    n: GroupModulus,
    monodromies: [GroupElement; 3],
}

impl TriangleCoverData {
    pub fn new(n: GroupModulus, g0: GroupElement, g1: GroupElement, ginf: GroupElement) -> Result<Self> {
        let sum = n.add(n.add(g0, g1), ginf);
        if sum != n.zero() {
            return Err(Error::InvalidMonodromy(format!(
                "g_0 + g_1 + g_inf = {sum}, expected (0,0)"
            )));
        }
        if !n.generates(g0, ginf) {
            return Err(Error::InvalidMonodromy(format!(
                "{g0}, {g1}, {ginf} do not generate (Z/{n})^2"
            )));
        }
        Ok(TriangleCoverData {
            n,
            monodromies: [g0, g1, ginf],
        })
    }

    /// g_0 = (1,0), g_1 = (−1,−1), g_∞ = (0,1).
    pub fn standard(n: GroupModulus) -> Self {
        TriangleCoverData {
            n,
            monodromies: [n.element(1, 0), n.element(-1, -1), n.element(0, 1)],
        }
    }

    pub fn modulus(&self) -> GroupModulus {
        self.n
    }

    pub fn monodromy(&self, p: BranchPoint) -> GroupElement {
        self.monodromies[p.index()]
    }

    pub fn monodromies(&self) -> [GroupElement; 3] {
        self.monodromies
    }

    pub fn is_standard(&self) -> bool {
        *self == Self::standard(self.n)
    }

    pub fn branch_order(&self, p: BranchPoint) -> u32 {
        self.n.element_order(self.monodromy(p))
    }

    /// Riemann–Hurwitz: 2g − 2 = |G|·(−2 + Σ_p (1 − 1/m_p)).
    pub fn genus(&self) -> u64 {
        let order = self.n.group_order() as i64;
        let ramification: i64 = BranchPoint::ALL
            .iter()
            .map(|&p| order - order / i64::from(self.branch_order(p)))
            .sum();
        let twice_g_minus_2 = -2 * order + ramification;
        (1 + twice_g_minus_2 / 2) as u64
    }

    /// Exponent e with ψ_p(g_p) = η^e, where ψ_p sends g_p to the primitive
    /// m_p-th root e^{2πi/m_p}.
    fn psi_exponent(&self, p: BranchPoint) -> u32 {
        self.n.get() / self.branch_order(p)
    }

    /// Pardini: n·deg L_χ = Σ_p n·r_p/m_p, where χ|H_p = ψ_p^{r_p}. With
    /// χ(g_p) = η^{e_p}, e_p ∈ 0..n, this is Σ_p e_p.
    pub fn building_bundle_degree(&self, chi: Character) -> EigensheafDegree {
        let n = self.n;
        let total: u64 = self
            .monodromies
            .iter()
            .map(|&g| u64::from(n.char_eval(chi, g).0))
            .sum();
        debug_assert_eq!(total % u64::from(n.get()), 0);
        EigensheafDegree((total / u64::from(n.get())) as i64)
    }

    /// (p_*ω)^χ ≅ ω_{P¹} ⊗ L_{−χ}.
    pub fn canonical_eigendegree(&self, chi: Character) -> EigensheafDegree {
        let minus = self.n.char_neg(chi);
        EigensheafDegree(-2 + self.building_bundle_degree(minus).0)
    }

    /// Number of branch points p with χ|H_p ≠ ψ_p.
    pub fn delta(&self, chi: Character) -> u32 {
        BranchPoint::ALL
            .iter()
            .filter(|&&p| self.n.char_eval(chi, self.monodromy(p)).0 != self.psi_exponent(p))
            .count() as u32
    }

    /// (p_*ω²)^χ ≅ (p_*ω)^χ ⊗ O(δ − 2).
    pub fn bicanonical_eigendegree(&self, chi: Character) -> Result<EigensheafDegree> {
        if self.n.get() < 4 {
            return Err(Error::ClosedFormRequiresN4(self.n.get()));
        }
        let canonical = self.canonical_eigendegree(chi).0;
        Ok(EigensheafDegree(canonical + i64::from(self.delta(chi)) - 2))
    }

    /// Divisor of the eigenform ω^(χ) as coefficients on (R_0, R_∞, R_1):
    /// (α − 1, β − 1, n − α − β − 1). Only defined on the triangle
    /// α, β ≥ 1, α + β ≤ n − 1 where the canonical eigenspace is nonzero.
    pub fn eigenform_divisor(&self, chi: Character) -> Result<(u32, u32, u32)> {
        let n = self.n.get();
        let (a, b) = (chi.alpha, chi.beta);
        if a == 0 || b == 0 || a + b > n - 1 {
            return Err(Error::NoEigenform(a, b));
        }
        Ok((a - 1, b - 1, n - a - b - 1))
    }

    fn degree(&self, power: Power, chi: Character) -> Result<EigensheafDegree> {
        match power {
            Power::Canonical => Ok(self.canonical_eigendegree(chi)),
            Power::Bicanonical => self.bicanonical_eigendegree(chi),
        }
    }

    /// Full n×n table of eigendegrees, rows indexed by α and columns by β.
    pub fn eigendegree_table(&self, power: Power) -> Result<DegreeTable> {
        let n = self.n;
        if power == Power::Bicanonical && n.get() < 4 {
            return Err(Error::ClosedFormRequiresN4(n.get()));
        }
        let degrees = (0..n.get())
            .into_par_iter()
            .map(|alpha| {
                (0..n.get())
                    .map(|beta| {
                        self.degree(power, Character { alpha, beta }).map(|d| d.0)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DegreeTable {
            n: n.get(),
            power,
            degrees,
        })
    }
}

/// Piecewise rule for the canonical summands: −2 at the trivial character,
/// 0 on the triangle α, β ≠ 0, α + β ≤ n − 1, and −1 elsewhere.
pub fn canonical_degree_closed_form(n: GroupModulus, chi: Character) -> EigensheafDegree {
    let n = n.get();
    let (a, b) = (chi.alpha, chi.beta);
    EigensheafDegree(if a == 0 && b == 0 {
        -2
    } else if a != 0 && b != 0 && a + b < n {
        0
    } else {
        -1
    })
}

/// The ten characters with bicanonical degree −1 (for n ≥ 4).
pub fn bicanonical_negative_set(n: GroupModulus) -> [Character; 10] {
    let n = n.get();
    [
        (0, 0),
        (0, 1),
        (1, 0),
        (1, 1),
        (0, n - 1),
        (n - 1, 0),
        (1, n - 1),
        (n - 1, 1),
        (1, n - 2),
        (n - 2, 1),
    ]
    .map(|(alpha, beta)| Character { alpha, beta })
}

/// Piecewise rule for the bicanonical summands: −1 on
/// [`bicanonical_negative_set`], +1 on the interior α, β ≥ 2,
/// α + β ≤ n − 2, and 0 elsewhere.
pub fn bicanonical_degree_closed_form(n: GroupModulus, chi: Character) -> Result<EigensheafDegree> {
    if n.get() < 4 {
        return Err(Error::ClosedFormRequiresN4(n.get()));
    }
    let (a, b) = (chi.alpha, chi.beta);
    Ok(EigensheafDegree(if bicanonical_negative_set(n).contains(&chi) {
        -1
    } else if a >= 2 && b >= 2 && a + b <= n.get() - 2 {
        1
    } else {
        0
    }))
}

/// Which pluricanonical power a table holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Power {
    Canonical,
    Bicanonical,
}

impl Power {
    pub fn from_int(k: u32) -> Result<Self> {
        match k {
            1 => Ok(Power::Canonical),
            2 => Ok(Power::Bicanonical),
            _ => Err(Error::Parse(format!("power {k}: only 1 and 2 are supported"))),
        }
    }

    pub fn as_int(self) -> u32 {
        match self {
            Power::Canonical => 1,
            Power::Bicanonical => 2,
        }
    }
}

impl Serialize for Power {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u32(self.as_int())
    }
}

impl<'de> Deserialize<'de> for Power {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let k = u32::deserialize(d)?;
        Power::from_int(k).map_err(serde::de::Error::custom)
    }
}

/// An n×n grid of eigendegrees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeTable {
    pub n: u32,
    pub power: Power,
    pub degrees: Vec<Vec<i64>>,
}

/// Above this size the text view keeps only the first and last few
/// rows/columns.
pub const FULL_TABLE_LIMIT: u32 = 24;
const HEAD: u32 = 5;
const TAIL: u32 = 3;

impl DegreeTable {
    pub fn get(&self, chi: Character) -> i64 {
        self.degrees[chi.alpha as usize][chi.beta as usize]
    }

    /// Σ_χ h⁰ over the whole table.
    pub fn total_sections(&self) -> u64 {
        self.degrees
            .iter()
            .flatten()
            .map(|&d| EigensheafDegree(d).h0())
            .sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("table serializes")
    }

    /// Header `alpha,0,1,...,n-1`, then one line per α.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha");
        for beta in 0..self.n {
            out.push_str(&format!(",{beta}"));
        }
        out.push('\n');
        for (alpha, row) in self.degrees.iter().enumerate() {
            out.push_str(&alpha.to_string());
            for d in row {
                out.push_str(&format!(",{d}"));
            }
            out.push('\n');
        }
        out
    }

    fn shown_indices(&self) -> Vec<Option<u32>> {
        if self.n <= FULL_TABLE_LIMIT {
            return (0..self.n).map(Some).collect();
        }
        let mut idx: Vec<_> = (0..HEAD).map(Some).collect();
        idx.push(None);
        idx.extend((self.n - TAIL..self.n).map(Some));
        idx
    }

    /// Aligned grid; `…` marks the elided middle range when n > 24.
    pub fn to_text(&self) -> String {
        let idx = self.shown_indices();
        let width = 4;
        let mut out = format!("{:>width$}", "α\\β");
        for j in &idx {
            match j {
                Some(j) => out.push_str(&format!("{j:>width$}")),
                None => out.push_str(&format!("{:>width$}", "…")),
            }
        }
        out.push('\n');
        for i in &idx {
            match i {
                Some(i) => {
                    out.push_str(&format!("{i:>width$}"));
                    for j in &idx {
                        match j {
                            Some(j) => out.push_str(&format!(
                                "{:>width$}",
                                self.degrees[*i as usize][*j as usize]
                            )),
                            None => out.push_str(&format!("{:>width$}", "…")),
                        }
                    }
                }
                None => {
                    out.push_str(&format!("{:>width$}", "…"));
                    for _ in &idx {
                        out.push_str(&format!("{:>width$}", "…"));
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}
