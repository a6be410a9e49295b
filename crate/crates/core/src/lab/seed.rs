//! Frozen seed-splitting scheme for reproducible campaigns.
//!
//! Every replica's generator seed is a pure function of the campaign base
//! seed, the experiment identifier, the parameter-combination fingerprint
//! and the replica index, so results are independent of scheduling, worker
//! count and list ordering. The mix is splitmix64, applied in three
//! chained rounds; the scheme is part of the output contract and must not
//! change between versions.

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fingerprint of a parameter combination from its raw f64 values.
pub fn hash_params(values: &[f64]) -> u64 {
    let mut h = 0x243F_6A88_85A3_08D3u64;
    for v in values {
        h = splitmix64(h ^ (v + 0.0).to_bits());
    }
    h
}

/// Replica seed: `base_seed x experiment x parameter values x replica`.
pub fn derive_seed(base_seed: u64, experiment_id: u64, param_hash: u64, replica: u64) -> u64 {
    let mut h = splitmix64(base_seed ^ experiment_id.wrapping_mul(0xA076_1D64_78BD_642F));
    h = splitmix64(h ^ param_hash);
    splitmix64(h ^ replica)
}
