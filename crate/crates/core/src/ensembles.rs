//! Seeded random inputs: Gaussian matrices, PSD/PD and density matrices,
//! unitaries, Kraus channels and the map families used by the check suites.
//!
//! Every generator is a pure function of the RNG it is handed. Streams come
//! from a [`SeedPlan`], so a trial's inputs depend only on
//! `(master_seed, suite id, check id, trial index)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{ComplexMatrix, PdMatrix, PsdMatrix, Tolerances, C64};
use crate::supermap::{pinching, embedding, SuperMap};

pub type Stream = ChaCha8Rng;

/// Human-readable description of [`SeedPlan::stream_seed`], recorded in reports.
pub const DERIVATION: &str = "splitmix64(master ^ splitmix64(fnv1a(suite) ^ splitmix64(fnv1a(check) ^ splitmix64(trial)))); stream = ChaCha8 seeded via seed_from_u64";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedPlan {
    pub master_seed: u64,
    pub derivation: String,
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

impl SeedPlan {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed, derivation: DERIVATION.to_string() }
    }

    pub fn stream_seed(&self, suite: &str, check: &str, trial: u64) -> u64 {
        let inner = splitmix64(fnv1a(check) ^ splitmix64(trial));
        splitmix64(self.master_seed ^ splitmix64(fnv1a(suite) ^ inner))
    }

    pub fn stream(&self, suite: &str, check: &str, trial: u64) -> Stream {
        stream_from_seed(self.stream_seed(suite, check, trial))
    }
}

pub fn stream_from_seed(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex normal: real and imaginary parts `N(0, 1/2)`.
pub fn complex_normal(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gen_gaussian(n: usize, m: usize, rng: &mut impl Rng) -> ComplexMatrix {
    // row-major fill keeps the draw order independent of storage layout
    let data: Vec<C64> = (0..n * m).map(|_| complex_normal(rng)).collect();
    ComplexMatrix::new(n, m, data).expect("finite gaussian entries")
}

/// Hermitian matrix `(G + G†)/2`.
pub fn gen_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    gen_gaussian(n, n, rng).hermitian_part()
}

/// Wishart-type PSD matrix `G G†` with `G` of shape `n × rank`.
pub fn gen_psd(n: usize, rank: usize, rng: &mut impl Rng) -> PsdMatrix {
    let g = gen_gaussian(n, rank.max(1), rng);
    PsdMatrix::from_symmetrized(&g.matmul(&g.adjoint()), &Tolerances::default()).expect("gram matrices are PSD")
}

/// `G G† + floor·1`, with minimum eigenvalue at least `floor`.
pub fn gen_pd(n: usize, rng: &mut impl Rng, floor: f64) -> Result<PdMatrix> {
    if !(floor > 0.0) || !floor.is_finite() {
        return Err(Error::InvalidInput(format!("PD floor must be positive, got {floor}")));
    }
    let g = gen_gaussian(n, n, rng);
    let m = &g.matmul(&g.adjoint()) + &ComplexMatrix::identity(n).scale(floor);
    let psd = PsdMatrix::from_symmetrized(&m, &Tolerances::default())?;
    // eigen-solver rounding can land a hair below the shift
    let effective = floor.min(psd.min_eig()).max(f64::MIN_POSITIVE);
    psd.into_pd(effective)
}

/// Unit-trace normalization of [`gen_pd`] with a small relative floor.
pub fn gen_density(n: usize, rng: &mut impl Rng) -> PdMatrix {
    let pd = gen_pd(n, rng, 1e-3).expect("positive floor");
    let scaled = pd.matrix().scale(1.0 / pd.trace());
    PdMatrix::from_symmetrized(&scaled, &Tolerances::default()).expect("scaled PD is PD")
}

/// Invertible matrix, redrawn until `σ_min ≥ 1e-3·σ_max`.
pub fn gen_invertible(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    loop {
        let g = gen_gaussian(n, n, rng);
        let sv = g.singular_values();
        let (lo, hi) = sv.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), s| (lo.min(*s), hi.max(*s)));
        if lo >= 1e-3 * hi {
            return g;
        }
    }
}

/// Haar isometry of shape `rows × cols`, `rows ≥ cols`: the `Q` factor of a
/// Gaussian matrix with the phases of `diag(R)` absorbed into its columns.
pub fn gen_isometry(rows: usize, cols: usize, rng: &mut impl Rng) -> Result<ComplexMatrix> {
    if rows < cols {
        return Err(Error::InvalidInput(format!("no {rows}x{cols} isometry exists")));
    }
    loop {
        let g = gen_gaussian(rows, cols, rng);
        let qr = g.as_nalgebra().clone().qr();
        let r = qr.r();
        if (0..cols).any(|i| r[(i, i)].norm() < 1e-8) {
            continue;
        }
        let mut q = qr.q();
        for j in 0..cols {
            let phase = r[(j, j)] / r[(j, j)].norm();
            q.column_mut(j).iter_mut().for_each(|x| *x *= phase);
        }
        return ComplexMatrix::from_nalgebra(q);
    }
}

pub fn gen_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    gen_isometry(n, n, rng).expect("square isometry exists")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelFlavor {
    TracePreserving,
    UnitalAdjoint,
}

/// Random Kraus channel `d_in → d_out`.
///
/// `TracePreserving` splits a `(k·d_out) × d_in` isometry into `k` Kraus
/// blocks. `UnitalAdjoint` builds a trace-preserving channel `d_out → d_in`
/// and returns its adjoint, so the result still maps `d_in → d_out`.
pub fn gen_channel(
    d_in: usize,
    d_out: usize,
    kraus_count: usize,
    rng: &mut impl Rng,
    flavor: ChannelFlavor,
) -> Result<SuperMap> {
    if kraus_count == 0 {
        return Err(Error::InvalidInput("kraus_count must be at least 1".into()));
    }
    let (src, dst) = match flavor {
        ChannelFlavor::TracePreserving => (d_in, d_out),
        ChannelFlavor::UnitalAdjoint => (d_out, d_in),
    };
    if kraus_count * dst < src {
        return Err(Error::InvalidInput(format!(
            "{kraus_count} Kraus operators of shape {dst}x{src} cannot form an isometry"
        )));
    }
    let v = gen_isometry(kraus_count * dst, src, rng)?;
    let ops: Vec<ComplexMatrix> = (0..kraus_count).map(|k| v.block(k * dst, 0, dst, src)).collect();
    let tp = SuperMap::from_kraus(&ops)?;
    Ok(match flavor {
        ChannelFlavor::TracePreserving => tp.with_label(format!("channel({d_in},{d_out},{kraus_count})")),
        ChannelFlavor::UnitalAdjoint => tp.adjoint().with_label(format!("unital_cp({d_in},{d_out},{kraus_count})")),
    })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Random sesquiunital CP map `d_in → d_out`.
///
/// With `N = 2·lcm(d_in, d_out)`, `a = N/d_in`, `b = N/d_out`, each term is
/// `X ↦ (1/b)·tr_b[U (X ⊗ 1_a) U†]` for a random unitary `U` on `C^N`; the
/// result averages `terms` of them. Then `Φ(1) = 1` and
/// `Φ†(1) = (a/b)·1 = (d_out/d_in)·1`.
pub fn gen_sesquiunital(d_in: usize, d_out: usize, terms: usize, rng: &mut impl Rng) -> Result<SuperMap> {
    if d_in == 0 || d_out == 0 || terms == 0 {
        return Err(Error::InvalidInput("dimensions and term count must be positive".into()));
    }
    let n = 2 * d_in / gcd(d_in, d_out) * d_out;
    let (a, b) = (n / d_in, n / d_out);
    let us: Vec<ComplexMatrix> = (0..terms).map(|_| gen_unitary(n, rng)).collect();
    let weight = 1.0 / (b as f64 * terms as f64);
    let id_a = ComplexMatrix::identity(a);
    SuperMap::from_linear_fn(d_in, d_out, |x| {
        let lifted = x.kron(&id_a);
        let mut out = ComplexMatrix::zeros(d_out, d_out);
        for u in &us {
            let y = u.matmul(&lifted).matmul(&u.adjoint());
            for i in 0..d_out {
                for j in 0..d_out {
                    let s: C64 = (0..b).map(|k| y.get(i * b + k, j * b + k)).sum();
                    out.set(i, j, out.get(i, j) + s * weight);
                }
            }
        }
        out
    })
    .map(|m| m.with_label(format!("sesquiunital({d_in},{d_out})")))
}

/// Map families the suites draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Adjoint of a random channel: unital CP.
    UnitalCp,
    /// Random sesquiunital CP map.
    Sesquiunital,
    /// Diagonal pinching; square dimensions only.
    Pinching,
    /// `X ↦ diag(X, X)`; requires `d_out = 2·d_in`.
    Embedding,
    /// Conjugation by a random unitary; square dimensions only.
    Unitary,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 5] =
        [FamilyKind::UnitalCp, FamilyKind::Sesquiunital, FamilyKind::Pinching, FamilyKind::Embedding, FamilyKind::Unitary];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::UnitalCp => "unital_cp",
            FamilyKind::Sesquiunital => "sesquiunital",
            FamilyKind::Pinching => "pinching",
            FamilyKind::Embedding => "embedding",
            FamilyKind::Unitary => "unitary",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Unknown(format!("map family '{s}'")))
    }

    pub fn supports(self, d_in: usize, d_out: usize) -> bool {
        match self {
            FamilyKind::UnitalCp | FamilyKind::Sesquiunital => true,
            FamilyKind::Pinching | FamilyKind::Unitary => d_in == d_out,
            FamilyKind::Embedding => d_out == 2 * d_in,
        }
    }

    /// Whether every member satisfies `Φ†(1) = (d_out/d_in)·1`.
    pub fn always_semiunital(self) -> bool {
        !matches!(self, FamilyKind::UnitalCp)
    }

    pub fn generate(self, d_in: usize, d_out: usize, rng: &mut impl Rng) -> Result<SuperMap> {
        if !self.supports(d_in, d_out) {
            return Err(Error::InvalidInput(format!("family {} does not support {d_in}→{d_out}", self.name())));
        }
        match self {
            FamilyKind::UnitalCp => {
                let k = rng.random_range(1..=3).max(d_out.div_ceil(d_in));
                gen_channel(d_in, d_out, k, rng, ChannelFlavor::UnitalAdjoint)
            }
            FamilyKind::Sesquiunital => gen_sesquiunital(d_in, d_out, 2, rng),
            FamilyKind::Pinching => Ok(pinching(d_in)),
            FamilyKind::Embedding => Ok(embedding(d_in)),
            FamilyKind::Unitary => {
                let u = gen_unitary(d_in, rng);
                Ok(SuperMap::from_kraus(&[u])?.with_label(format!("unitary({d_in})")))
            }
        }
    }
}
