//! Künneth bookkeeping for products of rigid manifolds.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quotient::{check_domain, invariants, ProductQuotientInput};
use crate::rigidity::MIN_N;

/// Kodaira dimension: −∞ or a non-negative integer. −∞ absorbs under
/// addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kodaira {
    NegInfinity,
    Finite(u32),
}

impl Kodaira {
    pub fn add(self, other: Kodaira) -> Kodaira {
        match (self, other) {
            (Kodaira::Finite(a), Kodaira::Finite(b)) => Kodaira::Finite(a + b),
            _ => Kodaira::NegInfinity,
        }
    }
}

impl PartialOrd for Kodaira {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Kodaira {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Kodaira::NegInfinity, Kodaira::NegInfinity) => Ordering::Equal,
            (Kodaira::NegInfinity, _) => Ordering::Less,
            (_, Kodaira::NegInfinity) => Ordering::Greater,
            (Kodaira::Finite(a), Kodaira::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::NegInfinity => f.write_str("-inf"),
            Kodaira::Finite(k) => k.fmt(f),
        }
    }
}

impl Serialize for Kodaira {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Kodaira::NegInfinity => s.serialize_str("-inf"),
            Kodaira::Finite(k) => s.serialize_u32(*k),
        }
    }
}

impl<'de> Deserialize<'de> for Kodaira {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u32),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(k) => Ok(Kodaira::Finite(k)),
            Raw::Str(s) if s == "-inf" => Ok(Kodaira::NegInfinity),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad Kodaira dimension {s}"))),
        }
    }
}

/// Numeric fingerprint of a compact complex manifold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ManifoldSummary {
    pub name: String,
    pub dim: u32,
    pub kodaira: Kodaira,
    #[serde(rename = "h0Theta")]
    pub h0_theta: u64,
    #[serde(rename = "h1Theta")]
    pub h1_theta: u64,
    #[serde(rename = "h1O")]
    pub h1_o: u64,
    pub rigid: bool,
    pub inf_rigid: bool,
}

impl ManifoldSummary {
    /// S_n for even n ≥ 8 with 3 ∤ n; h¹(Θ) is the node count.
    pub fn surface(n: u32) -> Result<Self> {
        check_domain(n, MIN_N)?;
        let inv = invariants(&ProductQuotientInput::standard(n)?)?;
        Ok(ManifoldSummary {
            name: format!("S{n}"),
            dim: 2,
            kodaira: Kodaira::Finite(2),
            h0_theta: 0,
            h1_theta: inv.h1_theta,
            h1_o: inv.q as u64,
            rigid: true,
            inf_rigid: false,
        })
    }

    pub fn projective_line() -> Self {
        ManifoldSummary {
            name: "P1".into(),
            dim: 1,
            kodaira: Kodaira::NegInfinity,
            h0_theta: 3,
            h1_theta: 0,
            h1_o: 0,
            rigid: true,
            inf_rigid: true,
        }
    }

    /// Parses `S<n>` or `P1`.
    pub fn parse(token: &str) -> Result<Self> {
        let t = token.trim();
        if t == "P1" {
            return Ok(Self::projective_line());
        }
        match t.strip_prefix('S').map(str::parse::<u32>) {
            Some(Ok(n)) => Self::surface(n),
            _ => Err(Error::Parse(format!("factor {t:?}: expected S<n> or P1"))),
        }
    }

    fn check(&self) -> Result<()> {
        if self.inf_rigid != (self.h1_theta == 0) || (self.inf_rigid && !self.rigid) {
            return Err(Error::Inconsistency(format!("rigidity flags of {}", self.name)));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("summary serializes")
    }

    pub fn to_csv(&self) -> String {
        format!(
            "name,dim,kodaira,h0Theta,h1Theta,h1O,rigid,infRigid\n{},{},{},{},{},{},{},{}\n",
            self.name, self.dim, self.kodaira, self.h0_theta, self.h1_theta, self.h1_o, self.rigid, self.inf_rigid
        )
    }

    pub fn to_text(&self) -> String {
        format!(
            "{}: dim={} kodaira={} h0Theta={} h1Theta={} h1O={} rigid={} infRigid={}\n",
            self.name, self.dim, self.kodaira, self.h0_theta, self.h1_theta, self.h1_o, self.rigid, self.inf_rigid
        )
    }
}

/// S_n (n = 8 unless given) and P¹.
pub fn builtin_summaries(n: Option<u32>) -> Result<Vec<ManifoldSummary>> {
    Ok(vec![
        ManifoldSummary::surface(n.unwrap_or(MIN_N))?,
        ManifoldSummary::projective_line(),
    ])
}

fn cross_terms(x: &ManifoldSummary, y: &ManifoldSummary) -> u64 {
    x.h0_theta * y.h1_o + x.h1_o * y.h0_theta
}

/// h¹(Θ_{X×Y}) = h¹(Θ_X) + h⁰(Θ_X)·h¹(O_Y) + h¹(O_X)·h⁰(Θ_Y) + h¹(Θ_Y).
pub fn kunneth_h1_theta(x: &ManifoldSummary, y: &ManifoldSummary) -> u64 {
    x.h1_theta + cross_terms(x, y) + y.h1_theta
}

/// X × Y, defined only when both Künneth cross terms vanish so that the
/// deformation space of the product splits.
pub fn product_summary(x: &ManifoldSummary, y: &ManifoldSummary) -> Result<ManifoldSummary> {
    if cross_terms(x, y) != 0 {
        return Err(Error::CrossTermNonzero(x.name.clone(), y.name.clone()));
    }
    let h1_theta = kunneth_h1_theta(x, y);
    let out = ManifoldSummary {
        name: format!("{} x {}", x.name, y.name),
        dim: x.dim + y.dim,
        kodaira: x.kodaira.add(y.kodaira),
        h0_theta: x.h0_theta + y.h0_theta,
        h1_theta,
        h1_o: x.h1_o + y.h1_o,
        rigid: x.rigid && y.rigid,
        inf_rigid: h1_theta == 0,
    };
    out.check()?;
    Ok(out)
}

/// Left-folded product of a comma- or `x`-separated factor list such as
/// `S8,P1,P1` or `S8 x P1 x P1`.
pub fn product_of(spec: &str) -> Result<ManifoldSummary> {
    let mut factors = spec
        .split([',', 'x'])
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(ManifoldSummary::parse);
    let first = factors
        .next()
        .ok_or_else(|| Error::Parse("empty factor list".into()))??;
    factors.try_fold(first, |acc, f| product_summary(&acc, &f?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A product of S_n and P¹ factors, e.g. `S8 x P1`.
    BuiltIn(String),
    /// Needs a rigid manifold of a Kodaira dimension not built here.
    External,
}

pub const EXTERNAL_WITNESS: &str = "external block required";

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::BuiltIn(s) => f.write_str(s),
            Witness::External => f.write_str(EXTERNAL_WITNESS),
        }
    }
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub d: u32,
    pub kodaira: Kodaira,
    pub witness: Witness,
}

/// Every (d, κ) with 3 ≤ d ≤ `d_max` for which S_n × X gives a rigid, not
/// infinitesimally rigid example: (3, −∞), (4, −∞), (4, 4), and for d ≥ 5
/// all κ ∉ {0, 1, 3}.
pub fn catalog(d_max: u32, n: u32) -> Result<Vec<CatalogEntry>> {
    check_domain(n, MIN_N)?;
    let mut out = Vec::new();
    for d in 3..=d_max {
        let mut kappas = vec![Kodaira::NegInfinity];
        match d {
            3 => {}
            4 => kappas.push(Kodaira::Finite(4)),
            _ => kappas.extend((2..=d).filter(|&k| k != 3).map(Kodaira::Finite)),
        }
        for kodaira in kappas {
            let witness = match kodaira {
                Kodaira::NegInfinity => {
                    let mut w = format!("S{n}");
                    for _ in 0..d - 2 {
                        w.push_str(" x P1");
                    }
                    Witness::BuiltIn(w)
                }
                Kodaira::Finite(k) if k == d && d % 2 == 0 => {
                    let w = vec![format!("S{n}"); (d / 2) as usize].join(" x ");
                    Witness::BuiltIn(w)
                }
                Kodaira::Finite(_) => Witness::External,
            };
            out.push(CatalogEntry { d, kodaira, witness });
        }
    }
    Ok(out)
}

pub fn catalog_to_json(entries: &[CatalogEntry]) -> String {
    serde_json::to_string(entries).expect("catalog serializes")
}

pub fn catalog_to_csv(entries: &[CatalogEntry]) -> String {
    let mut out = String::from("d,kodaira,witness\n");
    for e in entries {
        out.push_str(&format!("{},{},{}\n", e.d, e.kodaira, e.witness));
    }
    out
}

pub fn catalog_to_text(entries: &[CatalogEntry]) -> String {
    let mut out = format!("{:>3} {:>7}  {}\n", "d", "kodaira", "witness");
    for e in entries {
        out.push_str(&format!("{:>3} {:>7}  {}\n", e.d, e.kodaira.to_string(), e.witness));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{h0_eigensheaf, EigensheafDegree};

    fn s(n: u32) -> ManifoldSummary {
        ManifoldSummary::surface(n).unwrap()
    }

    fn p1() -> ManifoldSummary {
        ManifoldSummary::projective_line()
    }

    #[test]
    fn builtins() {
        let b = builtin_summaries(None).unwrap();
        assert_eq!(b[0].h1_theta, 6);
        assert_eq!(b[1].h1_theta, 0);
        // vector fields on P¹ are sections of O(2)
        assert_eq!(b[1].h0_theta, h0_eigensheaf(EigensheafDegree(2)));
        assert!(builtin_summaries(Some(9)).is_err());
    }

    #[test]
    fn kunneth_values() {
        assert_eq!(kunneth_h1_theta(&s(8), &s(8)), 12);
        assert_eq!(kunneth_h1_theta(&s(8), &p1()), 6);
        assert_eq!(kunneth_h1_theta(&p1(), &p1()), 0);
    }

    #[test]
    fn products() {
        let x = product_summary(&s(8), &p1()).unwrap();
        assert_eq!((x.dim, x.kodaira, x.rigid, x.inf_rigid), (3, Kodaira::NegInfinity, true, false));
        let y = product_summary(&s(8), &s(10)).unwrap();
        assert_eq!((y.dim, y.kodaira, y.h1_theta), (4, Kodaira::Finite(4), 12));
        assert!(y.rigid && !y.inf_rigid);
        let z = product_of("S8,P1,P1").unwrap();
        assert_eq!((z.dim, z.kodaira, z.h1_theta), (4, Kodaira::NegInfinity, 6));
        assert_eq!(product_of("P1").unwrap(), p1());
        let pp = product_summary(&p1(), &p1()).unwrap();
        assert!(pp.inf_rigid && pp.rigid);
    }

    #[test]
    fn cross_term_refused() {
        let torus = ManifoldSummary {
            name: "E".into(),
            dim: 1,
            kodaira: Kodaira::Finite(0),
            h0_theta: 1,
            h1_theta: 1,
            h1_o: 1,
            rigid: false,
            inf_rigid: false,
        };
        assert!(matches!(product_summary(&p1(), &torus), Err(Error::CrossTermNonzero(..))));
        assert!(product_summary(&s(8), &torus).is_ok());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(product_of(""), Err(Error::Parse(_))));
        assert!(matches!(product_of("S8,Q3"), Err(Error::Parse(_))));
        assert_eq!(product_of("S12"), Err(Error::DivisibleByThree(12)));
    }

    #[test]
    fn catalog_rows() {
        let c = catalog(6, 8).unwrap();
        let at = |d| c.iter().filter(move |e| e.d == d).map(|e| e.kodaira).collect::<Vec<_>>();
        assert_eq!(at(3), vec![Kodaira::NegInfinity]);
        assert_eq!(at(4), vec![Kodaira::NegInfinity, Kodaira::Finite(4)]);
        assert_eq!(
            at(5),
            vec![Kodaira::NegInfinity, Kodaira::Finite(2), Kodaira::Finite(4), Kodaira::Finite(5)]
        );
        let six = c.iter().find(|e| e.d == 6 && e.kodaira == Kodaira::Finite(6)).unwrap();
        assert_eq!(six.witness, Witness::BuiltIn("S8 x S8 x S8".into()));
        assert_eq!(c[0].witness, Witness::BuiltIn("S8 x P1".into()));
        let five = c.iter().find(|e| e.d == 5 && e.kodaira == Kodaira::Finite(2)).unwrap();
        assert_eq!(five.witness, Witness::External);
    }

    #[test]
    fn catalog_json_rows() {
        let json = catalog_to_json(&catalog(4, 8).unwrap());
        assert_eq!(
            json,
            r#"[{"d":3,"kodaira":"-inf","witness":"S8 x P1"},{"d":4,"kodaira":"-inf","witness":"S8 x P1 x P1"},{"d":4,"kodaira":4,"witness":"S8 x S8"}]"#
        );
    }

    #[test]
    fn summary_json_round_trip() {
        let x = product_of("S8,P1").unwrap();
        let back: ManifoldSummary = serde_json::from_str(&x.to_json()).unwrap();
        assert_eq!(back, x);
    }
}
