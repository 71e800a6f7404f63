//! Quartic equations `a·x⁴ + b·x²y² + c·y⁴ = d·z^e`, resolvent systems
//! `m·X² + n·Y² = k·X'² + l·Y'²` with `XY = X'Y'` and coprime pairs, and the
//! fixed catalog of both.

use std::fmt;
use std::sync::OnceLock;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::arith::{coprime, iroot_exact, Int};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquationError {
    #[error("({x}, {y}, {z}) does not satisfy {equation}")]
    NotASolution { equation: String, x: Int, y: Int, z: Int },
    #[error("invalid equation: {0}")]
    InvalidEquation(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuarticEquation {
    pub id: String,
    pub a: Int,
    pub b: Int,
    pub c: Int,
    pub d: Int,
    /// Exponent of `z` on the right-hand side, 2 or 4.
    pub e: u32,
}

impl QuarticEquation {
    pub fn new(id: impl Into<String>, a: i64, b: i64, c: i64, d: i64, e: u32) -> Result<Self, EquationError> {
        if a == 0 || d == 0 {
            return Err(EquationError::InvalidEquation("a and d must be nonzero".into()));
        }
        if e != 2 && e != 4 {
            return Err(EquationError::InvalidEquation(format!("exponent {e} not in {{2, 4}}")));
        }
        Ok(Self {
            id: id.into(),
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
            e,
        })
    }

    /// Left-hand side `a·x⁴ + b·x²y² + c·y⁴`.
    pub fn lhs(&self, x: &Int, y: &Int) -> Int {
        let (xx, yy) = (x * x, y * y);
        &self.a * &xx * &xx + &self.b * &xx * &yy + &self.c * &yy * &yy
    }

    pub fn rhs(&self, z: &Int) -> Int {
        &self.d * num_traits::pow(z.clone(), self.e as usize)
    }

    pub fn satisfied_by(&self, x: &Int, y: &Int, z: &Int) -> bool {
        self.lhs(x, y) == self.rhs(z)
    }

    /// `true` when the form is unchanged by `x ↔ y`.
    pub fn is_swap_symmetric(&self) -> bool {
        self.a == self.c
    }

    pub fn expression(&self) -> String {
        let mut s = String::new();
        push_term(&mut s, &self.a, "x⁴");
        push_term(&mut s, &self.b, "x²y²");
        push_term(&mut s, &self.c, "y⁴");
        s.push('=');
        push_term(&mut s, &self.d, if self.e == 4 { "z⁴" } else { "z²" });
        s
    }
}

impl fmt::Display for QuarticEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.expression())
    }
}

fn push_term(out: &mut String, coeff: &Int, monomial: &str) {
    if coeff.is_zero() {
        return;
    }
    if coeff.is_negative() {
        out.push('-');
    } else if !out.is_empty() && !out.ends_with('=') {
        out.push('+');
    }
    let magnitude = coeff.abs();
    if magnitude != Int::from(1) {
        out.push_str(&magnitude.to_string());
    }
    out.push_str(monomial);
}

/// Resolvent `m·X² + n·Y² = k·X'² + l·Y'²`, `X·Y = X'·Y'`, `(X,Y) = (X',Y') = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolventSystem {
    pub id: String,
    pub m: Int,
    pub n: Int,
    pub k: Int,
    pub l: Int,
}

impl ResolventSystem {
    pub fn new(id: impl Into<String>, m: i64, n: i64, k: i64, l: i64) -> Self {
        Self {
            id: id.into(),
            m: m.into(),
            n: n.into(),
            k: k.into(),
            l: l.into(),
        }
    }

    pub fn r1() -> Self {
        Self::new("R1", 1, -1, 1, 1)
    }

    pub fn r2() -> Self {
        Self::new("R2", 1, -2, 1, 2)
    }

    pub fn coefficients(&self) -> (&Int, &Int, &Int, &Int) {
        (&self.m, &self.n, &self.k, &self.l)
    }

    pub fn is_r1(&self) -> bool {
        let r1 = Self::r1();
        self.coefficients() == r1.coefficients()
    }

    pub fn quadratic_holds(&self, x: &Int, y: &Int, xp: &Int, yp: &Int) -> bool {
        &self.m * x * x + &self.n * y * y == &self.k * xp * xp + &self.l * yp * yp
    }

    pub fn expression(&self) -> String {
        let mut left = String::new();
        push_term(&mut left, &self.m, "x²");
        push_term(&mut left, &self.n, "y²");
        let mut right = String::new();
        push_term(&mut right, &self.k, "x'²");
        push_term(&mut right, &self.l, "y'²");
        format!("{left}={right}, xy=x'y', (x,y)=(x',y')=1")
    }
}

impl fmt::Display for ResolventSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.expression())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct QuarticSolution {
    pub x: Int,
    pub y: Int,
    pub z: Int,
    pub primitive: bool,
    pub trivial: bool,
}

impl QuarticSolution {
    /// Wraps coordinates, deriving the primitivity and triviality flags.
    pub fn new(x: Int, y: Int, z: Int) -> Self {
        let primitive = coprime(&x, &y);
        let trivial = is_trivial_pair(&x, &y);
        Self { x, y, z, primitive, trivial }
    }

    pub fn coords(&self) -> [Int; 3] {
        [self.x.clone(), self.y.clone(), self.z.clone()]
    }

    /// All sign variants `(±x, ±y, ±z)`, deduplicated and sorted.
    pub fn orbit(&self) -> Vec<[Int; 3]> {
        let mut out = Vec::with_capacity(8);
        for mask in 0..8u8 {
            let flip = |v: &Int, bit: u8| if mask & bit != 0 { -v } else { v.clone() };
            out.push([flip(&self.x, 1), flip(&self.y, 2), flip(&self.z, 4)]);
        }
        out.sort();
        out.dedup();
        out
    }
}

/// `x·y = 0` or `|x| = |y|`.
pub fn is_trivial_pair(x: &Int, y: &Int) -> bool {
    x.is_zero() || y.is_zero() || x.abs() == y.abs()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ResolventSolution {
    pub x: Int,
    pub y: Int,
    pub xp: Int,
    pub yp: Int,
    pub trivial: bool,
}

impl ResolventSolution {
    pub fn new(x: Int, y: Int, xp: Int, yp: Int) -> Self {
        let trivial = (&x * &y).is_zero();
        Self { x, y, xp, yp, trivial }
    }

    pub fn coords(&self) -> [Int; 4] {
        [self.x.clone(), self.y.clone(), self.xp.clone(), self.yp.clone()]
    }

    /// Absolute values of every coordinate.
    pub fn canonical(&self) -> Self {
        Self::new(self.x.abs(), self.y.abs(), self.xp.abs(), self.yp.abs())
    }

    /// Sign variants that keep `X·Y = X'·Y'`, deduplicated and sorted.
    pub fn orbit(&self) -> Vec<[Int; 4]> {
        let mut out = Vec::with_capacity(16);
        for mask in 0..16u8 {
            let flip = |v: &Int, bit: u8| if mask & bit != 0 { -v } else { v.clone() };
            let c = [flip(&self.x, 1), flip(&self.y, 2), flip(&self.xp, 4), flip(&self.yp, 8)];
            if &c[0] * &c[1] == &c[2] * &c[3] {
                out.push(c);
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Every `z` with `d·z^e = L(x, y)`: none, `0`, or `±z` (positive first).
pub fn eval_quartic(eq: &QuarticEquation, x: &Int, y: &Int) -> Vec<QuarticSolution> {
    let value = eq.lhs(x, y);
    if !(&value % &eq.d).is_zero() {
        return Vec::new();
    }
    let Some(z) = iroot_exact(&(value / &eq.d), eq.e) else {
        return Vec::new();
    };
    if z.is_zero() {
        vec![QuarticSolution::new(x.clone(), y.clone(), z)]
    } else {
        vec![
            QuarticSolution::new(x.clone(), y.clone(), z.clone()),
            QuarticSolution::new(x.clone(), y.clone(), -z),
        ]
    }
}

/// Quadratic equality, product equality and both coprimality conditions.
pub fn check_resolvent(sys: &ResolventSystem, x: &Int, y: &Int, xp: &Int, yp: &Int) -> bool {
    sys.quadratic_holds(x, y, xp, yp) && x * y == xp * yp && coprime(x, y) && coprime(xp, yp)
}

pub fn check_resolvent_solution(sys: &ResolventSystem, sol: &ResolventSolution) -> bool {
    check_resolvent(sys, &sol.x, &sol.y, &sol.xp, &sol.yp)
}

/// Triviality of a solution, after confirming it satisfies `eq`.
pub fn classify_trivial(eq: &QuarticEquation, sol: &QuarticSolution) -> Result<bool, EquationError> {
    if !eq.satisfied_by(&sol.x, &sol.y, &sol.z) {
        return Err(EquationError::NotASolution {
            equation: eq.id.clone(),
            x: sol.x.clone(),
            y: sol.y.clone(),
            z: sol.z.clone(),
        });
    }
    Ok(is_trivial_pair(&sol.x, &sol.y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    R1,
    R2,
    Both,
    NonMember,
}

impl Membership {
    pub fn as_str(self) -> &'static str {
        match self {
            Membership::R1 => "R1",
            Membership::R2 => "R2",
            Membership::Both => "both",
            Membership::NonMember => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub equation: QuarticEquation,
    pub membership: Membership,
}

pub fn list_catalog() -> &'static [CatalogEntry] {
    static CATALOG: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        use Membership::*;
        let rows: [(&str, [i64; 4], u32, Membership); 12] = [
            ("E1", [1, 0, -1, 1], 2, R1),
            ("E2", [1, 0, 4, 1], 2, R1),
            ("E3", [1, 0, 1, 2], 2, R1),
            ("E4", [1, 6, 1, 1], 2, R1),
            ("E5", [1, -6, 1, 1], 2, R1),
            ("E6", [1, 0, 1, 1], 2, R2),
            ("E7", [1, 0, -4, 1], 2, R2),
            ("E8", [1, 0, -1, 2], 2, R2),
            ("E9", [1, 12, 4, 1], 2, R2),
            ("E10", [1, -12, 4, 1], 2, R2),
            ("E11", [1, 0, 1, 1], 4, Both),
            ("X1", [1, 0, 2, 1], 2, NonMember),
        ];
        rows.into_iter()
            .map(|(id, [a, b, c, d], e, membership)| CatalogEntry {
                equation: QuarticEquation::new(id, a, b, c, d, e).expect("catalog rows are valid"),
                membership,
            })
            .collect()
    })
}

pub fn resolvent_catalog() -> &'static [ResolventSystem] {
    static SYSTEMS: OnceLock<Vec<ResolventSystem>> = OnceLock::new();
    SYSTEMS.get_or_init(|| vec![ResolventSystem::r1(), ResolventSystem::r2()])
}

fn normalize_key(key: &str) -> String {
    key.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '−' => '-',
            c => c,
        })
        .collect::<String>()
        .replace("^4", "⁴")
        .replace("^2", "²")
        .to_lowercase()
}

/// Finds a catalog equation by id (`E2`) or by expression (`x⁴+4y⁴=z²`,
/// `x^4 + 4y^4 = z^2`).
pub fn lookup(key: &str) -> Option<&'static CatalogEntry> {
    let key = normalize_key(key);
    list_catalog().iter().find(|entry| {
        entry.equation.id.to_lowercase() == key || normalize_key(&entry.equation.expression()) == key
    })
}

pub fn lookup_resolvent(id: &str) -> Option<&'static ResolventSystem> {
    resolvent_catalog().iter().find(|s| s.id.eq_ignore_ascii_case(id.trim()))
}
