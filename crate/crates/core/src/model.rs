//! Population models and synthetic network generation.

use ndarray::Array2;
use once_cell::sync::OnceCell;

use crate::eigen::sym_eigen_topd;
use crate::error::{Error, Result};
use crate::noise::NoiseSpec;
use crate::rng::RngStream;
use crate::scalar::{cast, Scalar};
use crate::sym::{check_finite, SymmetricMatrix};

/// Latent-position model: X (n-by-d) with expectation P = X X^T.
/// P and its Gram construction are computed lazily and cached.
#[derive(Debug)]
pub struct LatentModel<F> {
    x: Array2<F>,
    p: OnceCell<SymmetricMatrix<F>>,
}

impl<F: Scalar> LatentModel<F> {
    pub fn new(x: Array2<F>) -> Result<Self> {
        check_finite(&x)?;
        Ok(Self { x, p: OnceCell::new() })
    }

    pub fn x(&self) -> &Array2<F> {
        &self.x
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn d(&self) -> usize {
        self.x.ncols()
    }

    /// Expectation P = X X^T (PSD and of rank at most d by construction).
    pub fn expectation(&self) -> &SymmetricMatrix<F> {
        self.p.get_or_init(|| {
            let prod = self.x.dot(&self.x.t());
            SymmetricMatrix::symmetrized(prod).expect("finite Gram matrix")
        })
    }
}

/// Block model: memberships over K communities plus a symmetric K-by-K
/// connection-strength matrix B, optionally carrying latent community
/// positions X_B with B = X_B X_B^T.
#[derive(Debug, Clone)]
pub struct CommunityModel<F> {
    memberships: Vec<usize>,
    k: usize,
    b: Array2<F>,
    latent: Option<Array2<F>>,
}

impl<F: Scalar> CommunityModel<F> {
    /// From an explicit symmetric B.
    pub fn from_connectivity(memberships: Vec<usize>, b: Array2<F>) -> Result<Self> {
        let k = b.nrows();
        if b.ncols() != k {
            return Err(Error::NotSquare(b.nrows(), b.ncols()));
        }
        check_finite(&b)?;
        for i in 0..k {
            for j in (i + 1)..k {
                if b[(i, j)] != b[(j, i)] {
                    return Err(Error::Asymmetric {
                        i,
                        j,
                        delta: (b[(i, j)] - b[(j, i)]).abs().to_f64().unwrap(),
                    });
                }
            }
        }
        validate_memberships(&memberships, k)?;
        Ok(Self { memberships, k, b, latent: None })
    }

    /// From community latent positions X_B (K-by-d), with B = X_B X_B^T.
    pub fn from_latent(memberships: Vec<usize>, x_b: Array2<F>) -> Result<Self> {
        check_finite(&x_b)?;
        let k = x_b.nrows();
        validate_memberships(&memberships, k)?;
        let b = SymmetricMatrix::symmetrized(x_b.dot(&x_b.t()))?.into_array();
        Ok(Self { memberships, k, b, latent: Some(x_b) })
    }

    pub fn memberships(&self) -> &[usize] {
        &self.memberships
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.memberships.len()
    }

    pub fn connectivity(&self) -> &Array2<F> {
        &self.b
    }

    pub fn latent(&self) -> Option<&Array2<F>> {
        self.latent.as_ref()
    }

    pub fn community_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &c in &self.memberships {
            sizes[c] += 1;
        }
        sizes
    }

    /// Size of the smallest community.
    pub fn n_min(&self) -> usize {
        self.community_sizes().into_iter().min().unwrap_or(0)
    }

    /// Binary membership matrix Z (n-by-K, one 1 per row).
    pub fn membership_matrix(&self) -> Array2<F> {
        let mut z = Array2::zeros((self.n(), self.k));
        for (i, &c) in self.memberships.iter().enumerate() {
            z[(i, c)] = F::one();
        }
        z
    }

    /// Expectation P = Z B Z^T, i.e. P_ij = B[z_i][z_j].
    pub fn expectation(&self) -> SymmetricMatrix<F> {
        let m = &self.memberships;
        SymmetricMatrix::from_upper(self.n(), |i, j| self.b[(m[i], m[j])])
    }
}

fn validate_memberships(memberships: &[usize], k: usize) -> Result<()> {
    if memberships.is_empty() {
        return Err(Error::InvalidParameter("empty membership vector".into()));
    }
    let mut seen = vec![false; k];
    for &c in memberships {
        if c >= k {
            return Err(Error::InvalidParameter(format!(
                "membership label {c} out of range for K={k}"
            )));
        }
        seen[c] = true;
    }
    if let Some(empty) = seen.iter().position(|&s| !s) {
        return Err(Error::InvalidParameter(format!("community {empty} is empty")));
    }
    Ok(())
}

/// Deterministic balanced assignment: vertex i joins community i mod K, so
/// community sizes differ by at most one.
pub fn make_balanced_memberships(n: usize, k: usize) -> Result<Vec<usize>> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "community count K={k} out of range for n={n}"
        )));
    }
    Ok((0..n).map(|i| i % k).collect())
}

/// Ordered collection of N symmetric networks on a common vertex set, with
/// optional per-network noise metadata.
#[derive(Debug, Clone)]
pub struct NetworkCollection<F> {
    networks: Vec<SymmetricMatrix<F>>,
    specs: Option<Vec<NoiseSpec>>,
}

impl<F: Scalar> NetworkCollection<F> {
    pub fn new(networks: Vec<SymmetricMatrix<F>>, specs: Option<Vec<NoiseSpec>>) -> Result<Self> {
        if networks.is_empty() {
            return Err(Error::InvalidParameter("empty network collection".into()));
        }
        let n = networks[0].n();
        if networks.iter().any(|m| m.n() != n) {
            return Err(Error::ShapeMismatch("networks differ in vertex count".into()));
        }
        if let Some(s) = &specs {
            if s.len() != networks.len() {
                return Err(Error::ShapeMismatch(format!(
                    "{} networks vs {} noise specs",
                    networks.len(),
                    s.len()
                )));
            }
        }
        Ok(Self { networks, specs })
    }

    pub fn len(&self) -> usize {
        self.networks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.networks.is_empty()
    }

    pub fn n(&self) -> usize {
        self.networks[0].n()
    }

    pub fn networks(&self) -> &[SymmetricMatrix<F>] {
        &self.networks
    }

    pub fn specs(&self) -> Option<&[NoiseSpec]> {
        self.specs.as_deref()
    }

    pub fn get(&self, s: usize) -> &SymmetricMatrix<F> {
        &self.networks[s]
    }
}

/// Draw rows of X i.i.d. multivariate normal with the given mean and PSD
/// covariance (sampled through a symmetric PSD square root of `cov`).
pub fn generate_latent_gaussian<F: Scalar>(
    n: usize,
    mean: &[F],
    cov: &Array2<F>,
    stream: RngStream,
) -> Result<LatentModel<F>> {
    let d = mean.len();
    if cov.nrows() != d || cov.ncols() != d {
        return Err(Error::ShapeMismatch(format!(
            "mean of length {d} vs covariance {:?}",
            cov.dim()
        )));
    }
    let root = psd_sqrt(cov)?;
    let mut rng = stream.rng();
    let mut x = Array2::zeros((n, d));
    let mut z = vec![F::zero(); d];
    for i in 0..n {
        for zk in z.iter_mut() {
            *zk = cast::<F>(rng.standard_normal());
        }
        for r in 0..d {
            let mut acc = mean[r];
            for c in 0..d {
                acc += root[(r, c)] * z[c];
            }
            x[(i, r)] = acc;
        }
    }
    LatentModel::new(x)
}

/// Symmetric PSD square root via eigendecomposition; rejects covariance
/// matrices with eigenvalues below `-1e-10 * (1 + lambda_max)`.
fn psd_sqrt<F: Scalar>(cov: &Array2<F>) -> Result<Array2<F>> {
    let d = cov.nrows();
    let cov = SymmetricMatrix::new_with_tol(cov.clone(), 1e-9)?;
    if d == 0 {
        return Ok(Array2::zeros((0, 0)));
    }
    let eig = sym_eigen_topd(&cov, d)?;
    let top = eig.values[0].max(F::zero());
    let tol = cast::<F>(1e-10) * (F::one() + top);
    let mut scaled = eig.vectors.clone();
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam < -tol {
            return Err(Error::InvalidParameter(format!(
                "covariance is not PSD: eigenvalue {}",
                lam.to_f64().unwrap()
            )));
        }
        let root = lam.max(F::zero()).sqrt();
        scaled.column_mut(k).mapv_inplace(|v| v * root);
    }
    Ok(scaled.dot(&eig.vectors.t()))
}

/// Generate N networks `A_s = P + E_s`: upper-triangle entries (diagonal
/// included) drawn independently from `specs[s]` and mirrored. Network `s`
/// consumes child stream `s`, so networks can be regenerated independently.
pub fn generate_collection<F: Scalar>(
    p: &SymmetricMatrix<F>,
    specs: &[NoiseSpec],
    stream: RngStream,
) -> Result<NetworkCollection<F>> {
    if specs.is_empty() {
        return Err(Error::InvalidParameter("need at least one noise spec".into()));
    }
    for spec in specs {
        spec.validate()?;
    }
    let n = p.n();
    let mut networks = Vec::with_capacity(specs.len());
    for (s, spec) in specs.iter().enumerate() {
        let mut rng = stream.child(s as u64).rng();
        let net = SymmetricMatrix::from_upper(n, |i, j| p[(i, j)] + spec.sample::<F>(&mut rng));
        networks.push(net);
    }
    NetworkCollection::new(networks, Some(specs.to_vec()))
}
