//! The product-quotient surface X_n = (C × C)/G and its resolution S_n.
//!
//! G acts on the first factor through the monodromies g_p and on the second
//! through h_p = A·g_p. Points of C × C with nontrivial stabilizer lie over
//! pairs of branch points (p, q) and have stabilizer ⟨g_p⟩ ∩ ⟨h_q⟩.

use serde::{Deserialize, Serialize};

use crate::cover::{BranchPoint, TriangleCoverData};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupModulus, TwistMatrix};

pub const NODE_TAG: &str = "A1 node";

/// Rejects n unless n is even, 3 ∤ n and n ≥ `min`, in that order of
/// precedence.
pub fn check_domain(n: u32, min: u32) -> Result<GroupModulus> {
    if n % 2 == 1 {
        return Err(Error::NOdd(n));
    }
    if n % 3 == 0 {
        return Err(Error::DivisibleByThree(n));
    }
    if n < min {
        return Err(Error::NTooSmall { n, min });
    }
    GroupModulus::new(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductQuotientInput {
    pub n: GroupModulus,
    pub twist: TwistMatrix,
    pub first: TriangleCoverData,
}

impl ProductQuotientInput {
    /// The standard construction: A = (1 −2; 2 −1) and the standard
    /// monodromies, for even n ≥ 4 with 3 ∤ n.
    pub fn standard(n: u32) -> Result<Self> {
        let n = check_domain(n, 4)?;
        Ok(ProductQuotientInput {
            n,
            twist: TwistMatrix::standard(n)?,
            first: TriangleCoverData::standard(n),
        })
    }

    /// Arbitrary twist and first-factor data over the same modulus.
    pub fn new(twist: TwistMatrix, first: TriangleCoverData) -> Result<Self> {
        let n = first.modulus();
        if twist.modulus() != n {
            return Err(Error::InvalidMonodromy(format!(
                "twist is defined mod {}, cover mod {n}",
                twist.modulus()
            )));
        }
        Ok(ProductQuotientInput { n, twist, first })
    }

    pub fn is_standard(&self) -> bool {
        self.first.is_standard()
            && TwistMatrix::standard(self.n).is_ok_and(|a| a == self.twist)
    }

    /// Monodromies h_p = A·g_p of the second factor.
    pub fn second_monodromies(&self) -> [GroupElement; 3] {
        self.first.monodromies().map(|g| self.twist.apply_element(g))
    }

    pub fn second(&self) -> Result<TriangleCoverData> {
        let [h0, h1, hinf] = self.second_monodromies();
        TriangleCoverData::new(self.n, h0, h1, hinf)
    }
}

/// One group of singular points of X_n lying over a pair of branch points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRecord {
    pub branch_pair: (BranchPoint, BranchPoint),
    pub stabilizer_generator: GroupElement,
    pub count: u64,
    pub type_tag: &'static str,
}

/// Whether the local action of s at a point over p is multiplication by −1.
fn acts_by_minus_one(cover: &TriangleCoverData, p: BranchPoint, s: GroupElement) -> bool {
    let n = cover.modulus();
    let g = cover.monodromy(p);
    let Some(k) = n.discrete_log(g, s) else {
        return false;
    };
    // ψ_p(g_p) = η^{n/m_p}, so ψ_p(s) = η^{k·n/m_p}
    let e = n.exponent(i64::from(k) * i64::from(n.get() / cover.branch_order(p)));
    2 * e.0 == n.get()
}

/// Points of C × C with nontrivial stabilizer lying over (p, q).
fn points_over(first: &TriangleCoverData, second: &TriangleCoverData, p: BranchPoint, q: BranchPoint) -> u64 {
    let order = first.modulus().group_order();
    (order / u64::from(first.branch_order(p))) * (order / u64::from(second.branch_order(q)))
}

pub fn singular_locus(input: &ProductQuotientInput) -> Result<Vec<NodeRecord>> {
    let n = input.n;
    let second = input.second()?;
    let mut nodes = Vec::new();
    for p in BranchPoint::ALL {
        for q in BranchPoint::ALL {
            let (g, h) = (input.first.monodromy(p), second.monodromy(q));
            let stab = n.cyclic_intersection(g, h);
            if stab.len() == 1 {
                continue;
            }
            if stab.len() > 2 {
                return Err(Error::NonNodal(format!(
                    "stabilizer of order {} over ({p},{q})",
                    stab.len()
                )));
            }
            let s = *stab.iter().find(|&&x| x != n.zero()).expect("|I| = 2");
            if n.element_order(s) != 2
                || !acts_by_minus_one(&input.first, p, s)
                || !acts_by_minus_one(&second, q, s)
            {
                return Err(Error::NonNodal(format!(
                    "stabilizer {s} over ({p},{q}) does not act by (-1,-1)"
                )));
            }
            let points = points_over(&input.first, &second, p, q);
            nodes.push(NodeRecord {
                branch_pair: (p, q),
                stabilizer_generator: s,
                count: points * stab.len() as u64 / n.group_order(),
                type_tag: NODE_TAG,
            });
        }
    }
    Ok(nodes)
}

/// Numerical invariants of the minimal resolution S of X.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurfaceInvariants {
    pub k2: i64,
    pub chi_o: i64,
    pub p_g: i64,
    pub q: i64,
    pub euler: i64,
    pub h1_theta: u64,
    pub genus_each_factor: (u64, u64),
    pub node_total: u64,
}

fn exact_div(num: i64, den: i64, what: &str) -> Result<i64> {
    if num % den != 0 {
        return Err(Error::Inconsistency(format!("{what}: {num}/{den} is not an integer")));
    }
    Ok(num / den)
}

fn expect_eq(what: &str, computed: i64, expected: i64) -> Result<()> {
    if computed != expected {
        return Err(Error::Inconsistency(format!(
            "{what}: computed {computed}, closed form {expected}"
        )));
    }
    Ok(())
}

/// Invariants of S with every cross-check enforced.
///
/// K² comes from the genera of the two factors, e(S) from an orbifold point
/// count, and χ(O) from Noether. For the standard input all three are
/// compared against the closed forms in n.
pub fn invariants(input: &ProductQuotientInput) -> Result<SurfaceInvariants> {
    let nodes = singular_locus(input)?;
    let second = input.second()?;
    let order = input.n.group_order() as i64;
    let (g1, g2) = (input.first.genus(), second.genus());
    let (gi1, gi2) = (g1 as i64, g2 as i64);

    let k2 = exact_div(8 * (gi1 - 1) * (gi2 - 1), order, "K^2")?;

    let euler_z = (2 - 2 * gi1) * (2 - 2 * gi2);
    let mut stabilized_points = 0i64;
    for p in BranchPoint::ALL {
        for q in BranchPoint::ALL {
            let (g, h) = (input.first.monodromy(p), second.monodromy(q));
            if input.n.cyclic_intersection(g, h).len() > 1 {
                stabilized_points += points_over(&input.first, &second, p, q) as i64;
            }
        }
    }
    let node_total: u64 = nodes.iter().map(|r| r.count).sum();
    // free part, then each node contributes its image point replaced by a (−2)-curve
    let euler = exact_div(euler_z - stabilized_points, order, "free quotient Euler number")?
        + 2 * node_total as i64;

    let chi_o = exact_div(k2 + euler, 12, "Noether")?;
    let q = 0;
    let p_g = chi_o - 1 + q;

    if input.is_standard() {
        let n = i64::from(input.n.get());
        expect_eq("K^2", k2, 2 * (n - 3) * (n - 3))?;
        expect_eq("chi(O)", chi_o, exact_div(n * n - 6 * n + 12, 4, "chi(O) closed form")?)?;
        expect_eq("p_g", p_g, (n / 2 - 2) * (n / 2 - 1))?;
        expect_eq("node total", node_total as i64, 6)?;
    }

    Ok(SurfaceInvariants {
        k2,
        chi_o,
        p_g,
        q,
        euler,
        h1_theta: node_total,
        genus_each_factor: (g1, g2),
        node_total,
    })
}

#[derive(Serialize, Deserialize)]
struct NodeJson {
    p: BranchPoint,
    q: BranchPoint,
    stabilizer: GroupElement,
    count: u64,
}

#[derive(Serialize, Deserialize)]
struct InvariantsJson {
    n: u32,
    #[serde(rename = "K2")]
    k2: i64,
    #[serde(rename = "chiO")]
    chi_o: i64,
    pg: i64,
    q: i64,
    euler: i64,
    #[serde(rename = "h1Theta")]
    h1_theta: u64,
    nodes: Vec<NodeJson>,
}

/// Invariants together with the node list they were derived from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantsReport {
    pub n: u32,
    pub invariants: SurfaceInvariants,
    pub nodes: Vec<NodeRecord>,
}

impl InvariantsReport {
    pub fn compute(input: &ProductQuotientInput) -> Result<Self> {
        Ok(InvariantsReport {
            n: input.n.get(),
            invariants: invariants(input)?,
            nodes: singular_locus(input)?,
        })
    }

    pub fn to_json(&self) -> String {
        let inv = &self.invariants;
        let json = InvariantsJson {
            n: self.n,
            k2: inv.k2,
            chi_o: inv.chi_o,
            pg: inv.p_g,
            q: inv.q,
            euler: inv.euler,
            h1_theta: inv.h1_theta,
            nodes: self
                .nodes
                .iter()
                .map(|r| NodeJson {
                    p: r.branch_pair.0,
                    q: r.branch_pair.1,
                    stabilizer: r.stabilizer_generator,
                    count: r.count,
                })
                .collect(),
        };
        serde_json::to_string(&json).expect("invariants serialize")
    }

    pub fn to_csv(&self) -> String {
        let inv = &self.invariants;
        format!(
            "n,K2,chiO,pg,q,euler,h1Theta,nodes\n{},{},{},{},{},{},{},{}\n",
            self.n, inv.k2, inv.chi_o, inv.p_g, inv.q, inv.euler, inv.h1_theta, inv.node_total
        )
    }

    pub fn to_text(&self) -> String {
        let inv = &self.invariants;
        let mut out = format!(
            "n={} K2={} chiO={} pg={} q={} euler={} h1Theta={}\n",
            self.n, inv.k2, inv.chi_o, inv.p_g, inv.q, inv.euler, inv.h1_theta
        );
        out.push_str(&format!(
            "factor genera: {} and {}\n",
            inv.genus_each_factor.0, inv.genus_each_factor.1
        ));
        for r in &self.nodes {
            out.push_str(&format!(
                "  over ({},{}): {} x {}, stabilizer {}\n",
                r.branch_pair.0, r.branch_pair.1, r.count, r.type_tag, r.stabilizer_generator
            ));
        }
        out
    }
}
