//! The six-character surjectivity criterion for the obstruction map and the
//! rigidity certificate built on it.
//!
//! The six nodes of X_n come in pairs (ν_p, ν'_p), one pair over each
//! diagonal branch pair (p, p). A sextuple of characters, two per p,
//! produces six invariant sections whose obstruction vectors form a
//! block-diagonal 6×6 matrix with entries in {0} ∪ {η^e}. Surjectivity is
//! rank 6, decided by exponent comparison.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cover::{BranchPoint, TriangleCoverData};
use crate::error::{Error, Result};
use crate::group::{Character, GroupElement, GroupModulus, RootOfUnityExponent, TwistMatrix};
use crate::quotient::{check_domain, invariants, singular_locus, ProductQuotientInput};

/// Smallest n for which the criterion is applied.
pub const MIN_N: u32 = 8;

/// Translation elements k_p and node stabilizers s_p, indexed 0, 1, ∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuxiliaryElements {
    pub k: [GroupElement; 3],
    pub s: [GroupElement; 3],
}

impl AuxiliaryElements {
    /// k_0 = k_1 = (1,0), k_∞ = (0,1); s_0 = (n/2,0), s_1 = (n/2,n/2),
    /// s_∞ = (0,n/2).
    pub fn new(n: GroupModulus) -> Result<Self> {
        if n.get() % 2 == 1 {
            return Err(Error::NOdd(n.get()));
        }
        let h = i64::from(n.get() / 2);
        Ok(AuxiliaryElements {
            k: [n.element(1, 0), n.element(1, 0), n.element(0, 1)],
            s: [n.element(h, 0), n.element(h, h), n.element(0, h)],
        })
    }

    pub fn k(&self, p: BranchPoint) -> GroupElement {
        self.k[p.index()]
    }

    pub fn s(&self, p: BranchPoint) -> GroupElement {
        self.s[p.index()]
    }
}

/// Parity class mod 2 required of both characters in slot p.
pub fn slot_parity(p: BranchPoint) -> (u32, u32) {
    match p {
        BranchPoint::Zero => (0, 1),
        BranchPoint::One => (1, 1),
        BranchPoint::Infinity => (1, 0),
    }
}

/// Two characters per branch point: (χ_p, χ'_p), indexed 0, 1, ∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharacterSextuple {
    pub pairs: [(Character, Character); 3],
}

impl CharacterSextuple {
    pub fn new(zero: (Character, Character), one: (Character, Character), inf: (Character, Character)) -> Self {
        CharacterSextuple {
            pairs: [zero, one, inf],
        }
    }

    pub fn pair(&self, p: BranchPoint) -> (Character, Character) {
        self.pairs[p.index()]
    }

    /// χ_0, χ'_0, χ_1, χ'_1, χ_∞, χ'_∞.
    pub fn flat(&self) -> [Character; 6] {
        let [(a, b), (c, d), (e, f)] = self.pairs;
        [a, b, c, d, e, f]
    }

    /// Each pair sorted so that χ_p < χ'_p lexicographically.
    pub fn canonical(&self) -> Self {
        CharacterSextuple {
            pairs: self.pairs.map(|(x, y)| if x <= y { (x, y) } else { (y, x) }),
        }
    }

    /// Equality up to swapping within pairs.
    pub fn same_up_to_pair_order(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl fmt::Display for CharacterSextuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = BranchPoint::ALL
            .iter()
            .map(|&p| {
                let (x, y) = self.pair(p);
                format!("{p}: {x} {y}")
            })
            .collect();
        f.write_str(&parts.join("; "))
    }
}

/// χ_0 = (2,1), χ'_0 = (4,1), χ_1 = (1,3), χ'_1 = (3,1), χ_∞ = (1,2),
/// χ'_∞ = (1,4).
pub fn reference_sextuple() -> CharacterSextuple {
    let c = |alpha, beta| Character { alpha, beta };
    CharacterSextuple::new((c(2, 1), c(4, 1)), (c(1, 3), c(3, 1)), (c(1, 2), c(1, 4)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParityCheck {
    pub ok: bool,
    /// In the order of [`CharacterSextuple::flat`].
    pub per_character: [bool; 6],
}

/// Condition (1): χ_0 ≡ χ'_0 ≡ (0,1), χ_1 ≡ χ'_1 ≡ (1,1),
/// χ_∞ ≡ χ'_∞ ≡ (1,0) mod 2.
pub fn check_parity(sextuple: &CharacterSextuple, n: GroupModulus) -> Result<ParityCheck> {
    if n.get() % 2 == 1 {
        return Err(Error::NOdd(n.get()));
    }
    let mut per_character = [false; 6];
    for p in BranchPoint::ALL {
        let (x, y) = sextuple.pair(p);
        let want = slot_parity(p);
        per_character[2 * p.index()] = (x.alpha % 2, x.beta % 2) == want;
        per_character[2 * p.index() + 1] = (y.alpha % 2, y.beta % 2) == want;
    }
    Ok(ParityCheck {
        ok: per_character.iter().all(|&b| b),
        per_character,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeparationCheck {
    pub ok: bool,
    /// (χ_p(k_p), χ'_p(k_p)) for p = 0, 1, ∞.
    pub exponents: [(RootOfUnityExponent, RootOfUnityExponent); 3],
}

fn k_elements(n: GroupModulus) -> [GroupElement; 3] {
    [n.element(1, 0), n.element(1, 0), n.element(0, 1)]
}

/// Condition (2): χ_p(k_p) ≠ χ'_p(k_p) for every p.
pub fn check_separation(sextuple: &CharacterSextuple, n: GroupModulus) -> SeparationCheck {
    let k = k_elements(n);
    let exponents = BranchPoint::ALL.map(|p| {
        let (x, y) = sextuple.pair(p);
        (n.char_eval(x, k[p.index()]), n.char_eval(y, k[p.index()]))
    });
    SeparationCheck {
        ok: exponents.iter().all(|(a, b)| a != b),
        exponents,
    }
}

/// Condition (3): every character has a nonzero canonical eigenspace,
/// i.e. canonical eigendegree 0.
pub fn check_canonical_nonvanishing(sextuple: &CharacterSextuple, cover: &TriangleCoverData) -> bool {
    sextuple
        .flat()
        .iter()
        .all(|&chi| cover.canonical_eigendegree(chi).0 >= 0)
}

/// χ′ = ᵗM⁻¹·χ, the character matching χ across the twisted action.
pub fn twisted_char(chi: Character, twist: &TwistMatrix) -> Character {
    twist.transpose_inverse().apply_character(chi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BicanonicalCheck {
    pub ok: bool,
    /// −χ′ = ᵗM⁻¹(−χ) for each character, flat order.
    pub images: [Character; 6],
    pub degrees: [i64; 6],
}

/// Condition (4): H⁰(ω²)^(−χ′) ≠ 0 for every character.
pub fn check_bicanonical_nonvanishing(
    sextuple: &CharacterSextuple,
    cover: &TriangleCoverData,
    twist: &TwistMatrix,
) -> Result<BicanonicalCheck> {
    let n = cover.modulus();
    let images = sextuple.flat().map(|chi| twisted_char(n.char_neg(chi), twist));
    let mut degrees = [0i64; 6];
    for (d, &img) in degrees.iter_mut().zip(&images) {
        *d = cover.bicanonical_eigendegree(img)?.0;
    }
    Ok(BicanonicalCheck {
        ok: degrees.iter().all(|&d| d >= 0),
        images,
        degrees,
    })
}

/// Vanishing orders at the node points: λ_p on the canonical factor and
/// μ_p on the bicanonical factor, each in {0, 1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalExponents {
    pub lambda: [u8; 3],
    pub mu: [u8; 3],
}

/// s_p ∈ ker χ ⇔ λ_p = 1 ⇔ μ_p = 0.
pub fn local_exponents(chi: Character, n: GroupModulus) -> Result<LocalExponents> {
    let aux = AuxiliaryElements::new(n)?;
    let in_kernel = BranchPoint::ALL.map(|p| n.in_kernel(chi, aux.s(p)));
    Ok(LocalExponents {
        lambda: in_kernel.map(u8::from),
        mu: in_kernel.map(|k| u8::from(!k)),
    })
}

/// The 6×6 obstruction matrix, stored as its three diagonal 2×2 blocks.
/// Rows are (ξ_{χ_p}, ξ_{χ'_p}), columns (ν_p, ν'_p); `None` is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObstructionMatrix {
    pub blocks: [[[Option<RootOfUnityExponent>; 2]; 2]; 3],
}

impl ObstructionMatrix {
    /// The full matrix with rows χ_0, χ'_0, χ_1, χ'_1, χ_∞, χ'_∞ and
    /// columns ν_0, ν'_0, ν_1, ν'_1, ν_∞, ν'_∞.
    pub fn entries(&self) -> [[Option<RootOfUnityExponent>; 6]; 6] {
        let mut out = [[None; 6]; 6];
        for (b, block) in self.blocks.iter().enumerate() {
            for (i, row) in block.iter().enumerate() {
                for (j, &e) in row.iter().enumerate() {
                    out[2 * b + i][2 * b + j] = e;
                }
            }
        }
        out
    }
}

/// Obstruction vectors of the six sections ξ_χ. The row of χ_p carries
/// (1, χ_p(k_p)⁻¹) on the columns of ν_p and ν'_p and zero elsewhere.
pub fn obstruction_matrix(sextuple: &CharacterSextuple, cover: &TriangleCoverData) -> Result<ObstructionMatrix> {
    let n = cover.modulus();
    if !check_parity(sextuple, n)?.ok || !check_canonical_nonvanishing(sextuple, cover) {
        return Err(Error::SectionsUnavailable);
    }
    let k = k_elements(n);
    let row = |chi: Character, p: BranchPoint| {
        let c = n.char_eval(chi, k[p.index()]);
        [Some(n.exponent(0)), Some(n.exponent(-i64::from(c.0)))]
    };
    let blocks = BranchPoint::ALL.map(|p| {
        let (x, y) = sextuple.pair(p);
        [row(x, p), row(y, p)]
    });
    Ok(ObstructionMatrix { blocks })
}

/// Rank of a 2×2 matrix whose entries are zero or roots of unity.
fn block_rank(block: &[[Option<RootOfUnityExponent>; 2]; 2], n: GroupModulus) -> u32 {
    let product = |x: Option<RootOfUnityExponent>, y: Option<RootOfUnityExponent>| {
        x.zip(y).map(|(x, y)| n.exponent(i64::from(x.0) + i64::from(y.0)))
    };
    let main = product(block[0][0], block[1][1]);
    let anti = product(block[0][1], block[1][0]);
    // det = main − anti vanishes iff both terms vanish or both are the same root
    let singular = main == anti;
    if !singular {
        2
    } else if block.iter().flatten().any(Option::is_some) {
        1
    } else {
        0
    }
}

/// Exact rank over Q(η), block by block.
pub fn surjectivity_rank(matrix: &ObstructionMatrix, n: GroupModulus) -> u32 {
    matrix.blocks.iter().map(|b| block_rank(b, n)).sum()
}

/// ᵗA⁻¹ in the closed form for n = 3m − 1 or n = 3m + 1.
pub fn case_matrix(n: u32) -> Result<[[i64; 2]; 2]> {
    let m = i64::from(n / 3);
    match n % 3 {
        2 => {
            let m = m + 1;
            Ok([[-m, -2 * m], [2 * m, m]])
        }
        1 => Ok([[m, 2 * m], [-2 * m, -m]]),
        _ => Err(Error::DivisibleByThree(n)),
    }
}

/// Images ᵗA⁻¹(−χ) of the reference sextuple in closed form, flat order.
pub fn case_table_images(n: u32) -> Result<[(i64, i64); 6]> {
    let ni = i64::from(n);
    match n % 3 {
        2 => {
            let m = (ni + 1) / 3;
            Ok([
                (m + 1, m - 2),
                (2, ni - 3),
                (m + 2, m - 2),
                (2 * m + 1, 2 * m - 3),
                (2 * m + 1, 2 * m - 2),
                (3, ni - 2),
            ])
        }
        1 => {
            let m = (ni - 1) / 3;
            Ok([
                (2 * m + 2, 2 * m - 1),
                (2, ni - 3),
                (2 * m + 3, 2 * m - 1),
                (m + 2, m - 2),
                (m + 2, m - 1),
                (3, ni - 2),
            ])
        }
        _ => Err(Error::DivisibleByThree(n)),
    }
}

/// Whether the closed-form dual matrix and the closed-form image table both
/// agree with [`twisted_char`] on the negated reference sextuple.
pub fn case_table_check(n: u32) -> Result<bool> {
    let modulus = check_domain(n, MIN_N)?;
    let a = TwistMatrix::standard(modulus)?;
    let closed = TwistMatrix::new(modulus, case_matrix(n)?)?;
    if closed != a.transpose_inverse() {
        return Ok(false);
    }
    let table = case_table_images(n)?;
    Ok(reference_sextuple()
        .flat()
        .iter()
        .zip(table)
        .all(|(&chi, (x, y))| twisted_char(modulus.char_neg(chi), &a) == modulus.character(x, y)))
}

/// Characters allowed in slot p: parity class, nonzero canonical
/// eigenspace and nonzero bicanonical eigenspace at −χ′.
fn slot_candidates(p: BranchPoint, cover: &TriangleCoverData, twist: &TwistMatrix) -> Result<Vec<Character>> {
    let n = cover.modulus();
    let (pa, pb) = slot_parity(p);
    let mut out = Vec::new();
    for alpha in (pa..n.get()).step_by(2) {
        for beta in (pb..n.get()).step_by(2) {
            let chi = Character { alpha, beta };
            if cover.canonical_eigendegree(chi).0 < 0 {
                continue;
            }
            let image = twisted_char(n.char_neg(chi), twist);
            if cover.bicanonical_eigendegree(image)?.0 >= 0 {
                out.push(chi);
            }
        }
    }
    Ok(out)
}

fn slot_pairs(p: BranchPoint, cover: &TriangleCoverData, twist: &TwistMatrix) -> Result<Vec<(Character, Character)>> {
    let n = cover.modulus();
    let k = k_elements(n)[p.index()];
    let cands = slot_candidates(p, cover, twist)?;
    let mut pairs = Vec::new();
    for (i, &x) in cands.iter().enumerate() {
        for &y in &cands[i + 1..] {
            if n.char_eval(x, k) != n.char_eval(y, k) {
                pairs.push((x, y));
            }
        }
    }
    Ok(pairs)
}

/// Admissible (χ_p, χ'_p) pairs for p = 0, 1, ∞, each list in
/// lexicographic order. The solutions of conditions (1)–(4) are exactly the
/// cartesian product of the three lists.
pub fn search_space(n: u32) -> Result<[Vec<(Character, Character)>; 3]> {
    let modulus = check_domain(n, MIN_N)?;
    let cover = TriangleCoverData::standard(modulus);
    let twist = TwistMatrix::standard(modulus)?;
    let [p0, p1, pinf] = BranchPoint::ALL.map(|p| slot_pairs(p, &cover, &twist));
    Ok([p0?, p1?, pinf?])
}

/// All sextuples satisfying conditions (1)–(4) with χ_p < χ'_p, in
/// lexicographic order, truncated to `limit` when given.
pub fn search_sextuples(n: u32, limit: Option<usize>) -> Result<Vec<CharacterSextuple>> {
    search_sextuples_with_jobs(n, limit, None)
}

/// As [`search_sextuples`], fanning out over the slot-0 pairs on `jobs`
/// worker threads. Output does not depend on `jobs`.
pub fn search_sextuples_with_jobs(n: u32, limit: Option<usize>, jobs: Option<usize>) -> Result<Vec<CharacterSextuple>> {
    let [p0, p1, pinf] = search_space(n)?;

    let expand = |&a: &(Character, Character)| -> Vec<CharacterSextuple> {
        let mut out = Vec::with_capacity(p1.len() * pinf.len());
        for &b in &p1 {
            for &c in &pinf {
                out.push(CharacterSextuple::new(a, b, c));
            }
        }
        out
    };

    if let Some(limit) = limit {
        return Ok(p0.iter().flat_map(expand).take(limit).collect());
    }
    let run = || -> Vec<CharacterSextuple> { p0.par_iter().flat_map_iter(expand).collect() };
    match jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build()
                .map_err(|e| Error::Inconsistency(format!("thread pool: {e}")))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

/// Outcome of running the brute-force search next to the certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub n: u32,
    pub found: usize,
    pub reference_found: bool,
    pub all_reverify: bool,
}

/// Runs the exhaustive search and re-checks every hit through the full
/// criterion path.
pub fn search_report(n: u32, jobs: Option<usize>) -> Result<SearchReport> {
    let modulus = check_domain(n, MIN_N)?;
    let hits = search_sextuples_with_jobs(n, None, jobs)?;
    let cover = TriangleCoverData::standard(modulus);
    let twist = TwistMatrix::standard(modulus)?;
    let reference = reference_sextuple();
    let mut all_reverify = true;
    for s in &hits {
        let ok = check_parity(s, modulus)?.ok
            && check_separation(s, modulus).ok
            && check_canonical_nonvanishing(s, &cover)
            && check_bicanonical_nonvanishing(s, &cover, &twist)?.ok
            && surjectivity_rank(&obstruction_matrix(s, &cover)?, modulus) == 6;
        all_reverify &= ok;
    }
    Ok(SearchReport {
        n,
        found: hits.len(),
        reference_found: hits.iter().any(|s| s.same_up_to_pair_order(&reference)),
        all_reverify,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conclusion {
    RigidNotInfRigid,
    CriterionFailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionFlags {
    pub parity: bool,
    pub separation: bool,
    pub canonical: bool,
    pub bicanonical: bool,
}

impl ConditionFlags {
    pub fn all(&self) -> bool {
        self.parity && self.separation && self.canonical && self.bicanonical
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitedFact {
    pub claim: String,
    #[serde(rename = "where")]
    pub location: String,
}

fn cited_facts() -> Vec<CitedFact> {
    [
        (
            "Def(C)^G is a point for a triangle curve",
            "rigidity of triangle curves: a Galois cover of P^1 branched in three points has no equivariant deformations",
        ),
        (
            "H^1(Theta_{X_n}) = 0",
            "pi_*(Theta_Z)^G = Theta_{X_n} for a quotient unramified in codimension 1 (Catanese 1989, proof of Cor. 1.20)",
        ),
        (
            "h^1(Theta_S) = dim T^*_X",
            "Burns-Wahl, with Grothendieck duality; T^*_X is the sum of the local spaces T^*_x, one-dimensional at each node",
        ),
        (
            "Def(S) = Def(Z)^G x R with R supported in a point; surjective ob^* forces R to be a point",
            "Catanese 1989, Cor. 1.20",
        ),
        (
            "S_n is minimal, regular and of general type",
            "standard product-quotient theory: the basket consists of nodes and K^2 > 0",
        ),
    ]
    .into_iter()
    .map(|(claim, location)| CitedFact {
        claim: claim.to_string(),
        location: location.to_string(),
    })
    .collect()
}

/// Machine-checkable record that S_n is rigid but not infinitesimally
/// rigid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RigidityCertificate {
    pub n: u32,
    pub sextuple: CharacterSextuple,
    pub conditions: ConditionFlags,
    pub separation_exponents: [(RootOfUnityExponent, RootOfUnityExponent); 3],
    pub twisted_images: [Character; 6],
    pub bicanonical_degrees: [i64; 6],
    pub local_exponents: [LocalExponents; 6],
    pub matrix_rank: u32,
    pub case_table: bool,
    pub k2: i64,
    pub node_total: u64,
    pub h1_theta: u64,
    pub conclusion: Conclusion,
    pub cited_facts: Vec<CitedFact>,
}

/// Obstruction vectors are written with the factor χ(k_p)⁻¹ coming from the
/// translation by (k_p, 0).
pub const CONVENTION: &str = "k_p";

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CertificateJson<'a> {
    n: u32,
    sextuple: [Character; 6],
    conditions: ConditionFlags,
    twisted_images: [Character; 6],
    bicanonical_degrees: [i64; 6],
    local_exponents: &'a [LocalExponents; 6],
    matrix_rank: u32,
    case_table: bool,
    #[serde(rename = "K2")]
    k2: i64,
    nodes: u64,
    h1_theta: u64,
    conclusion: Conclusion,
    convention: &'static str,
    cited_facts: &'a [CitedFact],
}

impl RigidityCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&CertificateJson {
            n: self.n,
            sextuple: self.sextuple.flat(),
            conditions: self.conditions,
            twisted_images: self.twisted_images,
            bicanonical_degrees: self.bicanonical_degrees,
            local_exponents: &self.local_exponents,
            matrix_rank: self.matrix_rank,
            case_table: self.case_table,
            k2: self.k2,
            nodes: self.node_total,
            h1_theta: self.h1_theta,
            conclusion: self.conclusion,
            convention: CONVENTION,
            cited_facts: &self.cited_facts,
        })
        .expect("certificate serializes")
    }

    pub fn to_text(&self) -> String {
        let c = &self.conditions;
        let mut out = format!("rigidity certificate for S_{}\n", self.n);
        out.push_str(&format!("  sextuple: {}\n", self.sextuple));
        out.push_str(&format!(
            "  conditions: parity={} separation={} canonical={} bicanonical={}\n",
            c.parity, c.separation, c.canonical, c.bicanonical
        ));
        let sep: Vec<String> = self
            .separation_exponents
            .iter()
            .map(|(a, b)| format!("{}/{}", a.0, b.0))
            .collect();
        out.push_str(&format!("  separation exponents chi(k_p)/chi'(k_p): {}\n", sep.join(" ")));
        let imgs: Vec<String> = self
            .twisted_images
            .iter()
            .zip(self.bicanonical_degrees)
            .map(|(c, d)| format!("{c}:{d}"))
            .collect();
        out.push_str(&format!("  twisted images -chi' (bicanonical degree): {}\n", imgs.join(" ")));
        out.push_str(&format!("  obstruction matrix rank: {}\n", self.matrix_rank));
        out.push_str(&format!("  closed-form case table: {}\n", self.case_table));
        out.push_str(&format!(
            "  K2={} nodes={} h1Theta={}\n",
            self.k2, self.node_total, self.h1_theta
        ));
        out.push_str(&format!("  convention: {CONVENTION}\n"));
        out.push_str(&format!("  conclusion: {:?}\n", self.conclusion));
        out.push_str("  cited facts:\n");
        for f in &self.cited_facts {
            out.push_str(&format!("    - {} [{}]\n", f.claim, f.location));
        }
        out
    }
}

/// Runs the whole criterion for S_n with the reference sextuple.
pub fn verify_rigidity(n: u32) -> Result<RigidityCertificate> {
    verify_with_sextuple(n, &reference_sextuple())
}

/// Runs the whole criterion for S_n with an arbitrary sextuple. Conditions
/// that fail are reported in the certificate rather than as errors.
pub fn verify_with_sextuple(n: u32, sextuple: &CharacterSextuple) -> Result<RigidityCertificate> {
    let modulus = check_domain(n, MIN_N)?;
    let input = ProductQuotientInput::standard(n)?;
    let nodes = singular_locus(&input)?;
    let inv = invariants(&input)?;
    let node_total: u64 = nodes.iter().map(|r| r.count).sum();
    if inv.h1_theta != node_total {
        return Err(Error::Inconsistency(format!(
            "h1(Theta) = {} but {} nodes",
            inv.h1_theta, node_total
        )));
    }

    let cover = input.first;
    let twist = input.twist;
    let parity = check_parity(sextuple, modulus)?;
    let separation = check_separation(sextuple, modulus);
    let canonical = check_canonical_nonvanishing(sextuple, &cover);
    let bicanonical = check_bicanonical_nonvanishing(sextuple, &cover, &twist)?;
    let conditions = ConditionFlags {
        parity: parity.ok,
        separation: separation.ok,
        canonical,
        bicanonical: bicanonical.ok,
    };

    let matrix_rank = match obstruction_matrix(sextuple, &cover) {
        Ok(m) => surjectivity_rank(&m, modulus),
        Err(Error::SectionsUnavailable) => 0,
        Err(e) => return Err(e),
    };
    let mut locals = [LocalExponents { lambda: [0; 3], mu: [0; 3] }; 6];
    for (slot, &chi) in locals.iter_mut().zip(&sextuple.flat()) {
        *slot = local_exponents(chi, modulus)?;
    }
    let case_table = case_table_check(n)?;

    let passed = conditions.all() && matrix_rank == 6 && node_total == 6 && case_table;
    Ok(RigidityCertificate {
        n,
        sextuple: *sextuple,
        conditions,
        separation_exponents: separation.exponents,
        twisted_images: bicanonical.images,
        bicanonical_degrees: bicanonical.degrees,
        local_exponents: locals,
        matrix_rank,
        case_table,
        k2: inv.k2,
        node_total,
        h1_theta: inv.h1_theta,
        conclusion: if passed {
            Conclusion::RigidNotInfRigid
        } else {
            Conclusion::CriterionFailed
        },
        cited_facts: cited_facts(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: u32) -> GroupModulus {
        GroupModulus::new(n).unwrap()
    }

    fn ch(a: u32, b: u32) -> Character {
        Character { alpha: a, beta: b }
    }

    fn with_slot(p: BranchPoint, pair: (Character, Character)) -> CharacterSextuple {
        let mut s = reference_sextuple();
        s.pairs[p.index()] = pair;
        s
    }

    #[test]
    fn reference_sextuple_slots() {
        let s = reference_sextuple();
        assert_eq!(s.pair(BranchPoint::One).0, ch(1, 3));
        assert_eq!(s.pair(BranchPoint::One).1, ch(3, 1));
        assert_eq!(s.pair(BranchPoint::Infinity).0, ch(1, 2));
        assert_eq!(s, s.canonical());
    }

    #[test]
    fn auxiliary_elements() {
        let aux = AuxiliaryElements::new(m(8)).unwrap();
        assert_eq!(aux.s(BranchPoint::Zero), m(8).element(4, 0));
        assert_eq!(aux.s(BranchPoint::One), m(8).element(4, 4));
        assert_eq!(aux.s(BranchPoint::Infinity), m(8).element(0, 4));
        assert!(aux.s.iter().all(|&s| m(8).element_order(s) == 2));
        assert_eq!(aux.k(BranchPoint::Infinity), m(8).element(0, 1));
        assert_eq!(AuxiliaryElements::new(m(9)), Err(Error::NOdd(9)));
    }

    #[test]
    fn parity() {
        let n = m(8);
        assert!(check_parity(&reference_sextuple(), n).unwrap().ok);
        let bad = with_slot(BranchPoint::Zero, (ch(1, 1), ch(4, 1)));
        let r = check_parity(&bad, n).unwrap();
        assert!(!r.ok);
        assert_eq!(r.per_character, [false, true, true, true, true, true]);
        let zero = CharacterSextuple::new((ch(0, 0), ch(0, 0)), (ch(0, 0), ch(0, 0)), (ch(0, 0), ch(0, 0)));
        assert!(!check_parity(&zero, n).unwrap().ok);
    }

    #[test]
    fn separation() {
        let n = m(8);
        let r = check_separation(&reference_sextuple(), n);
        assert!(r.ok);
        assert_eq!(r.exponents[0], (RootOfUnityExponent(2), RootOfUnityExponent(4)));
        assert!(!check_separation(&with_slot(BranchPoint::Zero, (ch(2, 1), ch(2, 1))), n).ok);
        assert!(!check_separation(&with_slot(BranchPoint::Zero, (ch(2, 1), ch(2, 5))), n).ok);
    }

    #[test]
    fn canonical_condition() {
        let cover = TriangleCoverData::standard(m(8));
        assert!(check_canonical_nonvanishing(&reference_sextuple(), &cover));
        assert!(!check_canonical_nonvanishing(&with_slot(BranchPoint::Zero, (ch(0, 1), ch(4, 1))), &cover));
        assert!(!check_canonical_nonvanishing(&with_slot(BranchPoint::Zero, (ch(2, 1), ch(4, 4))), &cover));
    }

    #[test]
    fn twisted_characters() {
        let n = m(8);
        let a = TwistMatrix::standard(n).unwrap();
        assert_eq!(twisted_char(ch(6, 7), &a), ch(4, 1));
        assert_eq!(twisted_char(ch(4, 7), &a), ch(2, 5));
        assert_eq!(twisted_char(ch(3, 5), &TwistMatrix::identity(n)), ch(3, 5));
    }

    #[test]
    fn bicanonical_condition() {
        let cover = TriangleCoverData::standard(m(8));
        let a = TwistMatrix::standard(m(8)).unwrap();
        let r = check_bicanonical_nonvanishing(&reference_sextuple(), &cover, &a).unwrap();
        assert!(r.ok);
        assert_eq!(r.images, [ch(4, 1), ch(2, 5), ch(5, 1), ch(7, 3), ch(7, 4), ch(3, 6)]);
        // −χ′ = (1,1) needs χ = −A^t(1,1) = −(3,−3) = (5,3)
        let n = m(8);
        let chi = n.char_neg(a.transpose().apply_character(ch(1, 1)));
        assert_eq!(twisted_char(n.char_neg(chi), &a), ch(1, 1));
        let bad = with_slot(BranchPoint::Zero, (chi, ch(4, 1)));
        assert!(!check_bicanonical_nonvanishing(&bad, &cover, &a).unwrap().ok);

        let cover10 = TriangleCoverData::standard(m(10));
        let a10 = TwistMatrix::standard(m(10)).unwrap();
        assert!(check_bicanonical_nonvanishing(&reference_sextuple(), &cover10, &a10).unwrap().ok);
    }

    #[test]
    fn condition_four_holds_under_either_dual_twist() {
        // the second factor's eigensheaf can also be matched through ᵗA
        // instead of ᵗA⁻¹; the reference sextuple survives both
        for n in [8u32, 10, 14, 16, 20, 22] {
            let n = m(n);
            let cover = TriangleCoverData::standard(n);
            let a = TwistMatrix::standard(n).unwrap();
            let dual = a.inverse();
            assert!(check_bicanonical_nonvanishing(&reference_sextuple(), &cover, &a).unwrap().ok);
            assert!(check_bicanonical_nonvanishing(&reference_sextuple(), &cover, &dual).unwrap().ok);
        }
    }

    #[test]
    fn local_exponent_values() {
        let n = m(8);
        let e = local_exponents(ch(2, 1), n).unwrap();
        assert_eq!((e.lambda[0], e.mu[0]), (1, 0));
        assert_eq!((e.lambda[2], e.mu[2]), (0, 1));
        let t = local_exponents(ch(0, 0), n).unwrap();
        assert_eq!(t.lambda, [1, 1, 1]);
        assert_eq!(t.mu, [0, 0, 0]);
    }

    #[test]
    fn obstruction_blocks() {
        let n = m(8);
        let cover = TriangleCoverData::standard(n);
        let mat = obstruction_matrix(&reference_sextuple(), &cover).unwrap();
        let e = |x| Some(RootOfUnityExponent(x));
        assert_eq!(mat.blocks[0], [[e(0), e(6)], [e(0), e(4)]]);
        let full = mat.entries();
        assert_eq!(full[0][2..], [None; 4]);
        assert_eq!(full[5][..4], [None; 4]);
        assert_eq!(surjectivity_rank(&mat, n), 6);

        let degenerate = with_slot(BranchPoint::Zero, (ch(2, 1), ch(2, 1)));
        let mat = obstruction_matrix(&degenerate, &cover).unwrap();
        assert_eq!(mat.blocks[0][0], mat.blocks[0][1]);
        assert_eq!(surjectivity_rank(&mat, n), 5);

        let all = CharacterSextuple::new((ch(2, 1), ch(2, 1)), (ch(1, 3), ch(1, 3)), (ch(1, 2), ch(1, 2)));
        assert_eq!(surjectivity_rank(&obstruction_matrix(&all, &cover).unwrap(), n), 3);

        let bad = with_slot(BranchPoint::Zero, (ch(1, 1), ch(4, 1)));
        assert_eq!(obstruction_matrix(&bad, &cover), Err(Error::SectionsUnavailable));
    }

    #[test]
    fn block_rank_with_zeros() {
        let n = m(8);
        let e = |x| Some(RootOfUnityExponent(x));
        assert_eq!(block_rank(&[[None, None], [None, None]], n), 0);
        assert_eq!(block_rank(&[[e(1), None], [None, e(3)]], n), 2);
        assert_eq!(block_rank(&[[e(1), None], [e(2), None]], n), 1);
        assert_eq!(block_rank(&[[e(1), e(2)], [e(3), e(4)]], n), 1);
        assert_eq!(block_rank(&[[e(1), e(2)], [e(3), e(5)]], n), 2);
    }

    #[test]
    fn case_tables() {
        assert_eq!(case_matrix(8).unwrap(), [[-3, -6], [6, 3]]);
        assert_eq!(case_matrix(10).unwrap(), [[3, 6], [-6, -3]]);
        assert!(case_table_check(8).unwrap());
        assert!(case_table_check(10).unwrap());
        assert!(case_table_check(14).unwrap());
        assert_eq!(case_table_images(10).unwrap()[4], (5, 2));
        assert_eq!(case_table_images(14).unwrap()[1], (2, 11));
        assert_eq!(case_table_check(12), Err(Error::DivisibleByThree(12)));
    }

    #[test]
    fn search_small_cases() {
        let hits = search_sextuples(8, None).unwrap();
        assert!(hits.iter().any(|s| s.same_up_to_pair_order(&reference_sextuple())));
        let mut sorted = hits.clone();
        sorted.sort();
        assert_eq!(sorted, hits);
        let first = search_sextuples(8, Some(1)).unwrap();
        assert_eq!(first.len(), 1);
        assert_eq!(first[0], hits[0]);
        assert_eq!(search_sextuples(6, None), Err(Error::DivisibleByThree(6)));
    }

    #[test]
    fn certificate_n8() {
        let cert = verify_rigidity(8).unwrap();
        assert_eq!(cert.conclusion, Conclusion::RigidNotInfRigid);
        assert_eq!((cert.matrix_rank, cert.h1_theta, cert.k2), (6, 6, 50));
        assert_eq!(verify_rigidity(12).unwrap_err(), Error::DivisibleByThree(12));
        assert_eq!(verify_rigidity(9).unwrap_err(), Error::NOdd(9));
        assert_eq!(verify_rigidity(4).unwrap_err(), Error::NTooSmall { n: 4, min: 8 });
    }

    #[test]
    fn failing_sextuple_gives_failed_certificate() {
        let bad = with_slot(BranchPoint::Zero, (ch(2, 1), ch(2, 5)));
        let cert = verify_with_sextuple(8, &bad).unwrap();
        assert!(!cert.conditions.separation);
        assert_eq!(cert.matrix_rank, 5);
        assert_eq!(cert.conclusion, Conclusion::CriterionFailed);
    }

    #[test]
    fn certificate_json_keys() {
        let json: serde_json::Value = serde_json::from_str(&verify_rigidity(8).unwrap().to_json()).unwrap();
        for key in [
            "n", "sextuple", "conditions", "twistedImages", "bicanonicalDegrees", "matrixRank", "nodes",
            "h1Theta", "conclusion", "convention", "citedFacts",
        ] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["sextuple"], serde_json::json!([[2, 1], [4, 1], [1, 3], [3, 1], [1, 2], [1, 4]]));
        assert_eq!(json["conclusion"], "RigidNotInfRigid");
        assert_eq!(json["convention"], "k_p");
        assert!(json["citedFacts"][0].get("where").is_some());
    }
}
