//! Seeded random stream morphisms between finite carriers.

use std::hash::{Hash, Hasher};

use rand::Rng;

use super::{Carrier, StreamError, StreamMor, StreamOb, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MemoryKind {
    /// `f_n(x_n)`, same table at every step
    Memoryless,
    /// `f_n(x_n)` with a different table per step
    StepDependent,
    /// `f_n(x_n, ..., x_0)`
    FullHistory,
}

impl MemoryKind {
    pub const ALL: [MemoryKind; 3] = [MemoryKind::Memoryless, MemoryKind::StepDependent, MemoryKind::FullHistory];

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::ALL[rng.gen_range(0..Self::ALL.len())]
    }
}

/// Word-at-a-time hasher with a splitmix64 finalizer per word. Table lookups
/// only need good mixing, not collision resistance.
struct TableHasher(u64);

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Hasher for TableHasher {
    fn finish(&self) -> u64 {
        mix(self.0)
    }

    fn write(&mut self, bytes: &[u8]) {
        for chunk in bytes.chunks(8) {
            let mut word = [0u8; 8];
            word[..chunk.len()].copy_from_slice(chunk);
            self.write_u64(u64::from_le_bytes(word));
        }
    }

    fn write_u64(&mut self, x: u64) {
        self.0 = mix(self.0 ^ x);
    }

    fn write_usize(&mut self, x: usize) {
        self.write_u64(x as u64);
    }
}

fn pick(seed: u64, salt: impl Hash, values: &[Value]) -> Value {
    let mut h = TableHasher(0);
    seed.hash(&mut h);
    salt.hash(&mut h);
    values[(h.finish() % values.len() as u64) as usize].clone()
}

/// A deterministic pseudo-random function table keyed by `seed`.
pub fn random_finite_mor(
    name: impl Into<String>,
    seed: u64,
    dom: Carrier,
    cod: Carrier,
    kind: MemoryKind,
) -> Result<StreamMor, StreamError> {
    if !dom.is_finite() {
        return Err(StreamError::NotFinite(dom.to_string()));
    }
    let values = cod.enumerate_values().ok_or_else(|| StreamError::NotFinite(cod.to_string()))?;
    let (d, c) = (StreamOb::Constant(dom), StreamOb::Constant(cod));
    Ok(match kind {
        MemoryKind::Memoryless => StreamMor::pointwise(name, d, c, move |_, x| Ok(pick(seed, x, &values))),
        MemoryKind::StepDependent => StreamMor::pointwise(name, d, c, move |n, x| Ok(pick(seed, (n, x), &values))),
        MemoryKind::FullHistory => StreamMor::primitive(name, d, c, move |_, h| Ok(pick(seed, h, &values))),
    })
}

pub fn random_value<R: Rng + ?Sized>(rng: &mut R, carrier: &Carrier) -> Option<Value> {
    let values = carrier.enumerate_values()?;
    Some(values[rng.gen_range(0..values.len())].clone())
}
