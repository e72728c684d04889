//! Exact arithmetic in G = (Z/nZ)², its dual group, and formal n-th roots of
//! unity.
//!
//! Roots of unity are never materialized as complex numbers. The value η^e
//! with η = exp(2πi/n) is carried as the residue `e mod n`, so every equality
//! test between roots of unity is an integer comparison.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn reduce(x: i64, n: u32) -> u32 {
    x.rem_euclid(i64::from(n)) as u32
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Modular inverse by the extended Euclidean algorithm.
fn inverse_mod(x: u32, n: u32) -> Option<u32> {
    let (mut r0, mut r1) = (i64::from(n), i64::from(x % n));
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| reduce(t0, n))
}

/// Order of each cyclic factor of G; |G| = n².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupModulus(u32);

/// An element (a, b) of (Z/nZ)², normalized to 0..n-1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "[u32; 2]", from = "[u32; 2]")]
pub struct GroupElement {
    pub a: u32,
    pub b: u32,
}

/// A character (α, β) of G acting by (a, b) ↦ η^{αa + βb}, normalized to
/// 0..n-1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "[u32; 2]", from = "[u32; 2]")]
pub struct Character {
    pub alpha: u32,
    pub beta: u32,
}

/// Formal η^e. Two exponents are equal iff their residues agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RootOfUnityExponent(pub u32);

impl From<GroupElement> for [u32; 2] {
    fn from(g: GroupElement) -> Self {
        [g.a, g.b]
    }
}

impl From<[u32; 2]> for GroupElement {
    fn from([a, b]: [u32; 2]) -> Self {
        GroupElement { a, b }
    }
}

impl From<Character> for [u32; 2] {
    fn from(c: Character) -> Self {
        [c.alpha, c.beta]
    }
}

impl From<[u32; 2]> for Character {
    fn from([alpha, beta]: [u32; 2]) -> Self {
        Character { alpha, beta }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.alpha, self.beta)
    }
}

impl fmt::Display for RootOfUnityExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "η^{}", self.0)
    }
}

impl fmt::Display for GroupModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl GroupModulus {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::ModulusTooSmall(n));
        }
        Ok(GroupModulus(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// |G| = n².
    pub fn group_order(self) -> u64 {
        u64::from(self.0) * u64::from(self.0)
    }

    pub fn residue(self, x: i64) -> u32 {
        reduce(x, self.0)
    }

    pub fn element(self, a: i64, b: i64) -> GroupElement {
        GroupElement {
            a: self.residue(a),
            b: self.residue(b),
        }
    }

    pub fn character(self, alpha: i64, beta: i64) -> Character {
        Character {
            alpha: self.residue(alpha),
            beta: self.residue(beta),
        }
    }

    pub fn exponent(self, e: i64) -> RootOfUnityExponent {
        RootOfUnityExponent(self.residue(e))
    }

    pub fn zero(self) -> GroupElement {
        GroupElement { a: 0, b: 0 }
    }

    pub fn add(self, g: GroupElement, h: GroupElement) -> GroupElement {
        self.element(i64::from(g.a) + i64::from(h.a), i64::from(g.b) + i64::from(h.b))
    }

    pub fn neg(self, g: GroupElement) -> GroupElement {
        self.element(-i64::from(g.a), -i64::from(g.b))
    }

    pub fn scale(self, k: i64, g: GroupElement) -> GroupElement {
        let n = i64::from(self.0);
        let k = k.rem_euclid(n);
        self.element(k * i64::from(g.a), k * i64::from(g.b))
    }

    pub fn char_add(self, x: Character, y: Character) -> Character {
        self.character(
            i64::from(x.alpha) + i64::from(y.alpha),
            i64::from(x.beta) + i64::from(y.beta),
        )
    }

    pub fn char_neg(self, x: Character) -> Character {
        self.character(-i64::from(x.alpha), -i64::from(x.beta))
    }

    /// Smallest k ≥ 1 with k·g = 0, i.e. n / gcd(n, a, b).
    pub fn element_order(self, g: GroupElement) -> u32 {
        let n = u64::from(self.0);
        (n / gcd(gcd(n, u64::from(g.a)), u64::from(g.b))) as u32
    }

    /// All multiples of g, in the order 0, g, 2g, ...
    pub fn cyclic_subgroup(self, g: GroupElement) -> Vec<GroupElement> {
        let mut out = vec![self.zero()];
        let mut cur = g;
        while cur != self.zero() {
            out.push(cur);
            cur = self.add(cur, g);
        }
        out
    }

    /// ⟨g⟩ ∩ ⟨h⟩ by enumerating both cyclic subgroups.
    pub fn cyclic_intersection(self, g: GroupElement, h: GroupElement) -> BTreeSet<GroupElement> {
        let left: BTreeSet<_> = self.cyclic_subgroup(g).into_iter().collect();
        self.cyclic_subgroup(h)
            .into_iter()
            .filter(|x| left.contains(x))
            .collect()
    }

    /// χ(g) = η^{αa + βb}.
    pub fn char_eval(self, chi: Character, g: GroupElement) -> RootOfUnityExponent {
        let n = u64::from(self.0);
        let e = (u64::from(chi.alpha) * u64::from(g.a) + u64::from(chi.beta) * u64::from(g.b)) % n;
        RootOfUnityExponent(e as u32)
    }

    /// Whether g lies in the kernel of χ.
    pub fn in_kernel(self, chi: Character, g: GroupElement) -> bool {
        self.char_eval(chi, g).0 == 0
    }

    /// Least k ≥ 0 with k·g = target, if target ∈ ⟨g⟩.
    pub fn discrete_log(self, g: GroupElement, target: GroupElement) -> Option<u32> {
        self.cyclic_subgroup(g)
            .iter()
            .position(|&x| x == target)
            .map(|k| k as u32)
    }

    /// Whether g and h generate all of G, i.e. the 2×2 matrix with columns
    /// g, h has unit determinant mod n.
    pub fn generates(self, g: GroupElement, h: GroupElement) -> bool {
        let det = i64::from(g.a) * i64::from(h.b) - i64::from(g.b) * i64::from(h.a);
        inverse_mod(self.residue(det), self.0).is_some()
    }
}

/// A 2×2 matrix over Z/nZ with unit determinant, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistMatrix {
    n: GroupModulus,
    m: [[u32; 2]; 2],
}

impl TwistMatrix {
    /// Rejects matrices whose determinant is not a unit mod n.
    pub fn new(n: GroupModulus, rows: [[i64; 2]; 2]) -> Result<Self> {
        let m = [
            [n.residue(rows[0][0]), n.residue(rows[0][1])],
            [n.residue(rows[1][0]), n.residue(rows[1][1])],
        ];
        let t = TwistMatrix { n, m };
        let det = t.det();
        if inverse_mod(det, n.get()).is_none() {
            return Err(Error::TwistNotInvertible { n: n.get(), det });
        }
        Ok(t)
    }

    /// A = (1 −2; 2 −1), invertible exactly when 3 ∤ n.
    pub fn standard(n: GroupModulus) -> Result<Self> {
        Self::new(n, [[1, -2], [2, -1]])
    }

    pub fn identity(n: GroupModulus) -> Self {
        TwistMatrix {
            n,
            m: [[1, 0], [0, 1]],
        }
    }

    pub fn modulus(&self) -> GroupModulus {
        self.n
    }

    pub fn entries(&self) -> [[u32; 2]; 2] {
        self.m
    }

    pub fn det(&self) -> u32 {
        let [[p, q], [r, s]] = self.m.map(|row| row.map(i64::from));
        self.n.residue(p * s - q * r)
    }

    /// M·v reduced mod n.
    pub fn apply(&self, v: (u32, u32)) -> (u32, u32) {
        let [[p, q], [r, s]] = self.m.map(|row| row.map(u64::from));
        let n = u64::from(self.n.get());
        let (x, y) = (u64::from(v.0), u64::from(v.1));
        (((p * x + q * y) % n) as u32, ((r * x + s * y) % n) as u32)
    }

    pub fn apply_element(&self, g: GroupElement) -> GroupElement {
        let (a, b) = self.apply((g.a, g.b));
        GroupElement { a, b }
    }

    pub fn apply_character(&self, chi: Character) -> Character {
        let (alpha, beta) = self.apply((chi.alpha, chi.beta));
        Character { alpha, beta }
    }

    /// Adjugate times the inverse of the determinant.
    pub fn inverse(&self) -> TwistMatrix {
        let n = self.n;
        let inv = i64::from(inverse_mod(self.det(), n.get()).expect("checked at construction"));
        let [[p, q], [r, s]] = self.m.map(|row| row.map(i64::from));
        let m = [
            [n.residue(inv * s), n.residue(-inv * q)],
            [n.residue(-inv * r), n.residue(inv * p)],
        ];
        TwistMatrix { n, m }
    }

    pub fn transpose(&self) -> TwistMatrix {
        let [[p, q], [r, s]] = self.m;
        TwistMatrix {
            n: self.n,
            m: [[p, r], [q, s]],
        }
    }

    /// ᵗM⁻¹, the matrix acting on characters dually to M on elements.
    pub fn transpose_inverse(&self) -> TwistMatrix {
        self.inverse().transpose()
    }
}
