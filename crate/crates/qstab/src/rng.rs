//! Counter-based random number generation.
//!
//! Every variate is a pure function of (seed, stream, counter), so trajectories
//! are reproducible and parallelizable without shared mutable state. The
//! mixing function is splitmix64-style finalization over the keyed counter.

/// Named sub-streams split from one root seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamKind {
    SmeNoise,
    InitState,
    PolicySample,
    WeightInit,
}

impl StreamKind {
    fn tag(self) -> u64 {
        match self {
            StreamKind::SmeNoise => 0x736d_655f_6e6f_6973,
            StreamKind::InitState => 0x696e_6974_5f73_7461,
            StreamKind::PolicySample => 0x706f_6c69_6379_5f73,
            StreamKind::WeightInit => 0x7765_6967_6874_5f69,
        }
    }
}

#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic stream of variates indexed by an advancing counter.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct NoiseStream {
    seed: u64,
    counter: u64,
}

impl NoiseStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0 }
    }

    /// Splits a named, indexed child stream off a root seed.
    pub fn split(root_seed: u64, kind: StreamKind, index: u64) -> Self {
        let seed = mix(root_seed ^ mix(kind.tag()) ^ mix(index.wrapping_mul(0xd134_2543_de82_ef95)));
        Self::new(seed)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    #[inline]
    fn word(&self, lane: u64) -> u64 {
        mix(self.seed ^ mix(self.counter.wrapping_mul(2).wrapping_add(lane)))
    }

    /// Uniform in (0, 1]; advances the counter by one.
    pub fn next_uniform(&mut self) -> f64 {
        let u = self.word(0);
        self.counter += 1;
        ((u >> 11) as f64 + 1.0) / (1u64 << 53) as f64
    }

    /// Standard normal via Box-Muller; advances the counter by exactly one
    /// (both uniforms come from lanes of the same counter value).
    pub fn next_standard_normal(&mut self) -> f64 {
        let u1 = ((self.word(0) >> 11) as f64 + 1.0) / (1u64 << 53) as f64;
        let u2 = ((self.word(1) >> 11) as f64 + 1.0) / (1u64 << 53) as f64;
        self.counter += 1;
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// Normal(0, variance).
    pub fn next_normal(&mut self, variance: f64) -> f64 {
        self.next_standard_normal() * variance.sqrt()
    }

    /// Uniform integer in [0, bound).
    pub fn next_below(&mut self, bound: u64) -> u64 {
        let u = self.word(0);
        self.counter += 1;
        // Modulo bias is negligible for the small bounds used here.
        u % bound
    }
}
