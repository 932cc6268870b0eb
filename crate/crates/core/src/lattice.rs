//! Congruence lattices Gamma_D = {(u, v) : D_j | L_j(u, v)}, their
//! determinants and Lagrange-Gauss reduced bases.

use serde::Serialize;

use crate::arith::{gcd, mod_inv};
use crate::error::{Error, Result};
use crate::surface::SurfaceSpec;

/// Row basis e1 = (a, b), e2 = (0, c) in Hermite normal form (0 <= b < c),
/// or an arbitrary basis after reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Lattice2 {
    pub e1: [i128; 2],
    pub e2: [i128; 2],
    pub det: i128,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Minima {
    pub s1: f64,
    pub s2: f64,
    pub s1_sq: i128,
    pub s2_sq: i128,
}

impl Lattice2 {
    pub fn standard() -> Self {
        Lattice2 { e1: [1, 0], e2: [0, 1], det: 1 }
    }

    fn hnf(a: i128, b: i128, c: i128) -> Self {
        Lattice2 { e1: [a, b.rem_euclid(c)], e2: [0, c], det: a * c }
    }

    /// Membership test; valid for bases in Hermite normal form.
    pub fn contains_hnf(&self, u: i128, v: i128) -> bool {
        let [a, b] = self.e1;
        let c = self.e2[1];
        u % a == 0 && (v - (u / a) * b) % c == 0
    }

    /// Sublattice of points with alpha*u + beta*v = 0 mod modulus.
    fn intersect(&self, alpha: i128, beta: i128, modulus: i128) -> Result<Lattice2> {
        if modulus == 1 {
            return Ok(*self);
        }
        let [a, b] = self.e1;
        let c = self.e2[1];
        let mm = |x: i128, y: i128| -> Result<i128> {
            x.rem_euclid(modulus)
                .checked_mul(y.rem_euclid(modulus))
                .map(|z| z.rem_euclid(modulus))
                .ok_or(Error::Overflow("lattice intersection"))
        };
        // point x*e1 + y*e2 lies in the sublattice iff A x + C y = 0 mod modulus
        let big_a = (mm(alpha, a)? + mm(beta, b)?).rem_euclid(modulus);
        let big_c = mm(beta, c)?;
        let g = gcd(big_c, modulus);
        let x0 = g / gcd(big_a, g);
        let step = modulus / g;
        let y0 = if step == 1 {
            0
        } else {
            let inv = mod_inv(big_c / g, step).expect("coprime after dividing by the gcd");
            // A x0 is divisible by g; solve (C/g) y = -(A x0 / g) mod step
            let ax0 = big_a.checked_mul(x0).ok_or(Error::Overflow("lattice intersection"))?;
            let t = (ax0 / g).rem_euclid(step);
            (-(t * inv)).rem_euclid(step)
        };
        let na = x0.checked_mul(a).ok_or(Error::Overflow("lattice intersection"))?;
        let nb = x0
            .checked_mul(b)
            .and_then(|z| z.checked_add(y0.checked_mul(c)?))
            .ok_or(Error::Overflow("lattice intersection"))?;
        let nc = step.checked_mul(c).ok_or(Error::Overflow("lattice intersection"))?;
        na.checked_mul(nc).ok_or(Error::Overflow("lattice determinant"))?;
        Ok(Lattice2::hnf(na, nb, nc))
    }
}

/// Hermite basis of Gamma_D.
pub fn gamma_basis(spec: &SurfaceSpec, dd: [u64; 4]) -> Result<Lattice2> {
    let mut lat = Lattice2::standard();
    for j in 0..4 {
        lat = lat.intersect(spec.a[j] as i128, spec.b[j] as i128, dd[j] as i128)?;
    }
    Ok(lat)
}

pub fn rho(spec: &SurfaceSpec, dd: [u64; 4]) -> Result<u128> {
    Ok(gamma_basis(spec, dd)?.det as u128)
}

/// m(e) = max over i < j of e_i + e_j.
pub fn m_of(e: [u32; 4]) -> u32 {
    let mut best = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            best = best.max(e[i] + e[j]);
        }
    }
    best
}

/// rho(p^e1, ..., p^e4): the closed form p^{m(e)} when p does not divide Delta,
/// the exact lattice otherwise.
pub fn rho_prime_power(spec: &SurfaceSpec, p: u64, e: [u32; 4]) -> Result<u128> {
    if spec.big_delta % p as i128 != 0 {
        return (p as u128)
            .checked_pow(m_of(e))
            .ok_or(Error::Overflow("rho closed form"));
    }
    let mut dd = [1u64; 4];
    for j in 0..4 {
        dd[j] = p.checked_pow(e[j]).ok_or(Error::Overflow("prime power"))?;
    }
    rho(spec, dd)
}

fn dot(x: [i128; 2], y: [i128; 2]) -> i128 {
    x[0] * y[0] + x[1] * y[1]
}

/// Lagrange-Gauss reduction: |e1| is the first minimum, |e2| the second.
pub fn reduce_basis(l: &Lattice2) -> (Lattice2, Minima) {
    let (mut x, mut y) = (l.e1, l.e2);
    if dot(x, x) > dot(y, y) {
        std::mem::swap(&mut x, &mut y);
    }
    loop {
        let nx = dot(x, x);
        // nearest integer to <x,y>/<x,x>
        let num = dot(x, y);
        let q = (2 * num + nx).div_euclid(2 * nx);
        y = [y[0] - q * x[0], y[1] - q * x[1]];
        if dot(y, y) >= nx {
            break;
        }
        std::mem::swap(&mut x, &mut y);
    }
    let det = (x[0] * y[1] - x[1] * y[0]).abs();
    let (s1_sq, s2_sq) = (dot(x, x), dot(y, y));
    (
        Lattice2 { e1: x, e2: y, det },
        Minima { s1: (s1_sq as f64).sqrt(), s2: (s2_sq as f64).sqrt(), s1_sq, s2_sq },
    )
}
