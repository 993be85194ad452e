//! Deterministic random streams keyed by `(master_seed, role_tag, trial_index)`.
//!
//! The key is hashed with SHA-256 and the digest seeds a ChaCha20 generator.
//! Both primitives are fixed, so the same key yields the same words on every
//! platform.

use rand::{Error, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

const DOMAIN: &[u8] = b"hpc-stream-v1";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub role_tag: String,
    pub trial_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, role_tag: impl Into<String>, trial_index: u64) -> Self {
        SeedSpec {
            master_seed,
            role_tag: role_tag.into(),
            trial_index,
        }
    }

    fn key(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(DOMAIN);
        h.update(self.master_seed.to_le_bytes());
        h.update((self.role_tag.len() as u64).to_le_bytes());
        h.update(self.role_tag.as_bytes());
        h.update(self.trial_index.to_le_bytes());
        h.finalize().into()
    }
}

/// A single-owner random stream.
#[derive(Debug, Clone)]
pub struct SeedStream(ChaCha20Rng);

impl SeedStream {
    /// Splits off an independent child stream keyed by the next 256 bits of this one.
    pub fn fork(&mut self) -> SeedStream {
        Self::from_rng(&mut self.0)
    }

    /// Stream keyed by 256 bits drawn from `rng`.
    pub fn from_rng<R: RngCore + ?Sized>(rng: &mut R) -> SeedStream {
        let mut seed = [0u8; 32];
        rng.fill_bytes(&mut seed);
        SeedStream(ChaCha20Rng::from_seed(seed))
    }
}

pub fn derive_stream(spec: &SeedSpec) -> SeedStream {
    SeedStream(ChaCha20Rng::from_seed(spec.key()))
}

impl RngCore for SeedStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), Error> {
        self.0.try_fill_bytes(dest)
    }
}
