//! Real-vector treatment of complex Gaussians.
//!
//! A complex scalar is carried as a real 2-vector; multiplication by a
//! complex constant becomes a rotation-scaling matrix ([`Mat2::rot_scale`]).
//! On top of that sit circularly symmetric sampling, information-form
//! fusion of 2-D Gaussians, and the positive-definite-symmetric predicates
//! used by the matrix-identity property suites.

use crate::error::{Error, Result};
use crate::mat::Mat2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Real 2-vector form of a complex scalar.
pub fn to_vec(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn from_vec(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

/// Zero-mean circularly symmetric complex Gaussian, parameterised by the
/// variance of one real component (total power is twice this).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZmcsGaussian {
    variance_per_component: f64,
}

impl ZmcsGaussian {
    pub fn new(variance_per_component: f64) -> Result<Self> {
        if !variance_per_component.is_finite() || variance_per_component < 0.0 {
            return Err(Error::InvalidParameter {
                name: "variance_per_component",
                reason: format!("must be finite and >= 0, got {variance_per_component}"),
            });
        }
        Ok(Self {
            variance_per_component,
        })
    }

    pub fn variance_per_component(&self) -> f64 {
        self.variance_per_component
    }

    /// Draw one sample; components are i.i.d. `N(0, variance_per_component)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let sd = self.variance_per_component.sqrt();
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(sd * re, sd * im)
    }
}

/// A Gaussian over one complex scalar in real-vector form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian2 {
    pub mean: [f64; 2],
    pub cov: Mat2,
}

impl Gaussian2 {
    pub fn isotropic(mean: Complex64, variance_per_component: f64) -> Self {
        Gaussian2 {
            mean: to_vec(mean),
            cov: Mat2::isotropic(variance_per_component),
        }
    }

    pub fn mean_complex(&self) -> Complex64 {
        from_vec(self.mean)
    }

    /// Draw a sample. Degenerate (zero-covariance) directions collapse to
    /// the mean, so a point mass is returned as the mean itself.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Complex64> {
        // Lower Cholesky of the symmetrised covariance.
        let c = &self.cov.0;
        let v00 = c[0][0];
        let v01 = 0.5 * (c[0][1] + c[1][0]);
        let v11 = c[1][1];
        if v00 < 0.0 || v11 < 0.0 {
            return Err(Error::InvalidParameter {
                name: "cov",
                reason: "negative diagonal".into(),
            });
        }
        let l00 = v00.sqrt();
        let l10 = if l00 > 0.0 { v01 / l00 } else { 0.0 };
        let l11 = (v11 - l10 * l10).max(0.0).sqrt();
        let g0: f64 = rng.sample(StandardNormal);
        let g1: f64 = rng.sample(StandardNormal);
        Ok(Complex64::new(
            self.mean[0] + l00 * g0,
            self.mean[1] + l10 * g0 + l11 * g1,
        ))
    }
}

/// Observation term for [`fuse`]. The uninformative case is a tagged
/// variant rather than a large-number variance, which would cancel badly
/// in information form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Likelihood {
    Uninformative,
    Gaussian(Gaussian2),
}

/// Information-form fusion of a Gaussian prior with a Gaussian likelihood:
/// posterior covariance `(P^-1 + L^-1)^-1`, posterior mean
/// `cov * (P^-1 mu_p + L^-1 mu_l)`.
pub fn fuse(prior: &Gaussian2, likelihood: &Likelihood) -> Result<Gaussian2> {
    let obs = match likelihood {
        Likelihood::Uninformative => return Ok(*prior),
        Likelihood::Gaussian(g) => g,
    };
    let pi = prior.cov.inverse()?;
    let li = obs.cov.inverse()?;
    let cov = pi.add(&li).inverse()?;
    let info_mean = [
        pi.mul_vec(prior.mean)[0] + li.mul_vec(obs.mean)[0],
        pi.mul_vec(prior.mean)[1] + li.mul_vec(obs.mean)[1],
    ];
    Ok(Gaussian2 {
        mean: cov.mul_vec(info_mean),
        cov,
    })
}

/// True iff `m` is symmetric (within 1e-12, relative to its magnitude) with
/// both eigenvalues strictly positive.
pub fn is_pds(m: &Mat2) -> bool {
    if !m.0.iter().flatten().all(|x| x.is_finite()) {
        return false;
    }
    if !m.is_symmetric(1e-12) {
        return false;
    }
    let ev = m.sym_eigenvalues();
    ev[0] > 0.0 && ev[1] > 0.0
}

/// Random PDS matrix `G^T G + eps*I` with `G` entries uniform in [-1, 1].
pub fn random_pds<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let mut g = [[0.0f64; 2]; 2];
    for row in &mut g {
        for x in row.iter_mut() {
            *x = rng.random_range(-1.0..=1.0);
        }
    }
    let g = Mat2(g);
    g.transpose().matmul(&g).add(&Mat2::isotropic(1e-9))
}

/// Random PDS matrix `D` with `I - D` also PDS, by rescaling a random PDS
/// draw below its largest eigenvalue.
pub fn random_pds_contraction<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let d = random_pds(rng);
    let lam_max = d.sym_eigenvalues()[1];
    let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    d.scale(u / (lam_max + 1e-9))
}
