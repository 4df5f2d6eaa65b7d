//! Orientation-preserving isometries of the Poincaré disc as SU(1,1)
//! matrices `[[a, b], [conj b, conj a]]`, acting by
//! `z -> (a z + b) / (conj(b) z + conj(a))`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Above this `|a|^2` the determinant can no longer be evaluated to better
/// than ~1e-10 in double precision, so renormalizing would inject error
/// instead of removing it.
const RENORM_LIMIT: f64 = 1e6;

#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 4]", from = "[f64; 4]")]
pub struct Isometry {
    pub a: Complex64,
    pub b: Complex64,
}

impl From<Isometry> for [f64; 4] {
    fn from(m: Isometry) -> Self {
        [m.a.re, m.a.im, m.b.re, m.b.im]
    }
}

impl From<[f64; 4]> for Isometry {
    fn from(v: [f64; 4]) -> Self {
        Isometry {
            a: Complex64::new(v[0], v[1]),
            b: Complex64::new(v[2], v[3]),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsometryKind {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Classification {
    pub kind: IsometryKind,
    /// Set for hyperbolic elements.
    pub translation_length: Option<f64>,
    /// `|Re a|` lies within ten tolerances of 1, so the kind is unreliable.
    pub ambiguous: bool,
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry {
        a: Complex64::new(1.0, 0.0),
        b: Complex64::new(0.0, 0.0),
    };

    /// Checked constructor: `|a|^2 - |b|^2 = 1` within `tol`, measured
    /// relative to `|a|^2` once that exceeds 1.
    pub fn new(a: Complex64, b: Complex64, tol: f64) -> Result<Self> {
        let m = Isometry { a, b };
        if !(a.is_finite() && b.is_finite()) || m.det_residual() > tol {
            return Err(Error::InvalidArgument(format!("({a}, {b}) is not in SU(1,1)")));
        }
        Ok(m)
    }

    /// Translation by `t` along the real diameter, towards +1.
    pub fn boost(t: f64) -> Self {
        Isometry {
            a: Complex64::new((t / 2.0).cosh(), 0.0),
            b: Complex64::new((t / 2.0).sinh(), 0.0),
        }
    }

    /// Translation by `t` along the diameter at angle `theta`.
    pub fn boost_along(t: f64, theta: f64) -> Self {
        Isometry {
            a: Complex64::new((t / 2.0).cosh(), 0.0),
            b: Complex64::from_polar((t / 2.0).sinh(), theta),
        }
    }

    /// Rotation `z -> e^{i theta} z`.
    pub fn rotation(theta: f64) -> Self {
        Isometry {
            a: Complex64::from_polar(1.0, theta / 2.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    /// The hyperbolic translation taking 0 to `z` along a diameter.
    pub fn translation_to(z: Complex64) -> Self {
        let s = 1.0 / (1.0 - z.norm_sqr()).sqrt();
        Isometry {
            a: Complex64::new(s, 0.0),
            b: z * s,
        }
    }

    pub fn det(&self) -> f64 {
        (self.a.norm() - self.b.norm()) * (self.a.norm() + self.b.norm())
    }

    /// `| |a|^2 - |b|^2 - 1 |`, relative to `|a|^2` when that exceeds 1.
    pub fn det_residual(&self) -> f64 {
        (self.det() - 1.0).abs() / self.a.norm_sqr().max(1.0)
    }

    /// Rescales onto the SU(1,1) constraint where that is well conditioned.
    pub fn renormalized(self) -> Self {
        let n = self.a.norm_sqr();
        if n > RENORM_LIMIT {
            return self;
        }
        let s = 1.0 / self.det().sqrt();
        Isometry { a: self.a * s, b: self.b * s }
    }

    pub fn inverse(&self) -> Self {
        Isometry { a: self.a.conj(), b: -self.b }
    }

    /// Matrix product without renormalization.
    pub fn compose_raw(&self, rhs: &Isometry) -> Isometry {
        Isometry {
            a: self.a * rhs.a + self.b * rhs.b.conj(),
            b: self.a * rhs.b + self.b * rhs.a.conj(),
        }
    }

    /// `self * rhs`, i.e. apply `rhs` first.
    pub fn compose(&self, rhs: &Isometry) -> Isometry {
        self.compose_raw(rhs).renormalized()
    }

    /// Raw Möbius action on any point of the Riemann sphere except the pole.
    pub fn act(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.b.conj() * z + self.a.conj())
    }

    pub fn apply(&self, z: DiscPoint) -> Result<DiscPoint> {
        let w = self.act(z.0);
        if !w.is_finite() || w.norm_sqr() >= 1.0 {
            return Err(Error::Overflow);
        }
        Ok(DiscPoint(w))
    }

    /// Image of the origin, `b / conj(a)`.
    pub fn orbit_point(&self) -> Complex64 {
        self.b / self.a.conj()
    }

    /// `d(0, m(0)) = 2 log(|a| + |b|)`; stays accurate when the orbit point
    /// is too close to the boundary to represent.
    pub fn displacement(&self) -> f64 {
        2.0 * (self.a.norm() + self.b.norm()).ln()
    }

    pub fn trace(&self) -> f64 {
        2.0 * self.a.re
    }

    pub fn classify(&self) -> Classification {
        self.classify_with(DEFAULT_TOL)
    }

    pub fn classify_with(&self, tol: f64) -> Classification {
        let re = self.a.re.abs();
        let near_one = (re - 1.0).abs();
        let identity = self.b.norm() <= tol && self.a.im.abs() <= tol && near_one <= tol;
        let kind = if identity {
            IsometryKind::Identity
        } else if re > 1.0 + tol {
            IsometryKind::Hyperbolic
        } else if re < 1.0 - tol {
            IsometryKind::Elliptic
        } else {
            IsometryKind::Parabolic
        };
        Classification {
            kind,
            translation_length: (kind == IsometryKind::Hyperbolic).then(|| 2.0 * re.acosh()),
            ambiguous: !identity && near_one <= 10.0 * tol,
        }
    }

    /// Translation length of a hyperbolic element.
    pub fn translation_length(&self) -> Result<f64> {
        let c = self.classify();
        c.translation_length.ok_or(Error::NotHyperbolic { re_a: self.a.re })
    }

    /// Boundary fixed points of a hyperbolic element, attracting first.
    pub fn axis(&self) -> Result<Geodesic> {
        if self.classify().kind != IsometryKind::Hyperbolic {
            return Err(Error::NotHyperbolic { re_a: self.a.re });
        }
        // fixed points solve conj(b) z^2 - 2i Im(a) z - b = 0
        let re = self.a.re;
        let root = ((re.abs() - 1.0) * (re.abs() + 1.0)).sqrt();
        let i_im = Complex64::new(0.0, self.a.im);
        let bc = self.b.conj();
        let plus = (i_im + root) / bc;
        let minus = (i_im - root) / bc;
        // |conj(b) z + conj(a)| = |Re a +- root| > 1 marks the attracting point
        let (attracting, repelling) = if re > 0.0 { (plus, minus) } else { (minus, plus) };
        Ok(Geodesic::new(attracting / attracting.norm(), repelling / repelling.norm()))
    }

    /// A conjugator `m` such that `m * self * m^-1` is a positive boost along
    /// the real diameter, so its axis passes through the origin.
    pub fn conjugate_to_standard(&self) -> Result<Isometry> {
        let axis = self.axis()?;
        Ok(Geodesic::new(axis.q, axis.p).standardizer())
    }

    /// `self * m * self^-1`.
    pub fn conjugate(&self, m: &Isometry) -> Isometry {
        self.compose(m).compose(&self.inverse())
    }

    /// Max-norm distance between matrices, identifying `M` with `-M`.
    pub fn distance_to(&self, other: &Isometry) -> f64 {
        let d = |s: f64| ((self.a - other.a * s).norm()).max((self.b - other.b * s).norm());
        d(1.0).min(d(-1.0))
    }
}

impl Mul for Isometry {
    type Output = Isometry;

    fn mul(self, rhs: Isometry) -> Isometry {
        self.compose(&rhs)
    }
}

impl fmt::Debug for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Isometry(a={}, b={})", self.a, self.b)
    }
}

/// Four floats `Re a, Im a, Re b, Im b`, each in shortest round-trip form.
impl fmt::Display for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.a.re, self.a.im, self.b.re, self.b.im)
    }
}

impl std::str::FromStr for Isometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|p| !p.is_empty())
            .map(|p| p.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad float {p:?}"))))
            .collect::<Result<_>>()?;
        let v: [f64; 4] = parts
            .try_into()
            .map_err(|_| Error::InvalidArgument("an isometry needs exactly four floats".into()))?;
        Ok(Isometry::from(v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscPoint(pub Complex64);

impl DiscPoint {
    pub const ORIGIN: DiscPoint = DiscPoint(Complex64::new(0.0, 0.0));

    pub fn new(z: Complex64) -> Result<Self> {
        if z.is_finite() && z.norm_sqr() < 1.0 {
            Ok(DiscPoint(z))
        } else {
            Err(Error::InvalidArgument(format!("{z} is not in the open disc")))
        }
    }

    /// The point at hyperbolic distance `r` from 0 in direction `theta`.
    pub fn polar(r: f64, theta: f64) -> Self {
        DiscPoint(Complex64::from_polar((r / 2.0).tanh(), theta))
    }

    pub fn z(&self) -> Complex64 {
        self.0
    }
}

/// Hyperbolic distance, `2 asinh(|z1 - z2| / sqrt((1-|z1|^2)(1-|z2|^2)))`.
pub fn dist(z1: DiscPoint, z2: DiscPoint) -> f64 {
    let num = (z1.0 - z2.0).norm();
    let den = ((1.0 - z1.0.norm_sqr()) * (1.0 - z2.0.norm_sqr())).sqrt();
    2.0 * (num / den).asinh()
}

/// A bi-infinite geodesic given by its ideal endpoints, oriented `p -> q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Geodesic {
    pub p: Complex64,
    pub q: Complex64,
}

impl Geodesic {
    pub fn new(p: Complex64, q: Complex64) -> Self {
        debug_assert!((p.norm() - 1.0).abs() < 1e-12 && (q.norm() - 1.0).abs() < 1e-12);
        Geodesic { p, q }
    }

    pub fn checked(p: Complex64, q: Complex64) -> Result<Self> {
        if (p.norm() - 1.0).abs() > 1e-12 || (q.norm() - 1.0).abs() > 1e-12 || (p - q).norm() < 1e-12 {
            return Err(Error::InvalidArgument(format!("({p}, {q}) are not distinct unit complex numbers")));
        }
        Ok(Geodesic { p, q })
    }

    /// The diameter through `e^{i theta}`, oriented from `-e^{i theta}`.
    pub fn diameter(theta: f64) -> Self {
        let q = Complex64::from_polar(1.0, theta);
        Geodesic { p: -q, q }
    }

    /// Point of the geodesic closest to the origin.
    pub fn closest_to_origin(&self) -> DiscPoint {
        let sum = self.p + self.q;
        let cos_phi = sum.norm() / 2.0;
        if cos_phi < 1e-15 {
            return DiscPoint::ORIGIN;
        }
        let sin_phi = (self.p - self.q).norm() / 2.0;
        let r = cos_phi / (1.0 + sin_phi);
        DiscPoint(sum / sum.norm() * r)
    }

    /// The isometry taking this geodesic onto the real diameter with
    /// `p -> -1`, `q -> +1`, and its point closest to the origin to 0.
    pub fn standardizer(&self) -> Isometry {
        let m0 = self.closest_to_origin().0;
        let t0 = Isometry::translation_to(m0).inverse();
        let p0 = t0.act(self.p);
        let rot = -(p0 / p0.norm()).conj();
        Isometry::rotation(rot.arg()).compose(&t0)
    }

    /// Orthogonal projection of `z`: the foot point and its signed arclength
    /// from [`Geodesic::closest_to_origin`], increasing towards `q`.
    pub fn project(&self, z: DiscPoint) -> (DiscPoint, f64) {
        let t = self.standardizer();
        let w = t.act(z.0);
        let s = 1.0 + w.norm_sqr();
        let x = 2.0 * w.re / (s + (s * s - 4.0 * w.re * w.re).max(0.0).sqrt());
        let foot = t.inverse().act(Complex64::new(x, 0.0));
        (DiscPoint(foot), 2.0 * x.atanh())
    }

    /// The point at signed arclength `s` along the geodesic.
    pub fn point_at(&self, s: f64) -> DiscPoint {
        let x = (s / 2.0).tanh();
        DiscPoint(self.standardizer().inverse().act(Complex64::new(x, 0.0)))
    }
}

pub fn project_to_geodesic(z: DiscPoint, g: &Geodesic) -> (DiscPoint, f64) {
    g.project(z)
}

/// Uniformly random angle helper for audits.
pub fn angle(u: f64) -> f64 {
    2.0 * PI * u
}
