//! PUF quality metrics: Hamming statistics, diffuseness, uniqueness,
//! reliability, Jaccard failed-set similarity, and the robustness
//! comparison against the retention baseline.

use crate::bank::{NoiseMode, SimulatedBank};
use crate::bits::BitMatrix;
use crate::campaign::{run_campaign, SimulatedSource};
use crate::condition::OperatingCondition;
use crate::error::Error;
use crate::frame::ReadoutFrame;
use crate::golden::{extract_key, GoldenDataSet, KeyRecord};
use crate::rng::derive;
use crate::Result;
use alloc::string::String;
use alloc::vec::Vec;

const D_ROBUST_PRELAT: u64 = 0x40;
const D_ROBUST_RETENTION: u64 = 0x41;

/// Count of 1s in a bit string.
pub fn hamming_weight(bits: &BitMatrix) -> usize {
    bits.count_ones()
}

/// Differing positions between two equal-length strings, as a count and a
/// fraction of the length.
pub fn hamming_distance(a: &BitMatrix, b: &BitMatrix) -> Result<(usize, f64)> {
    let count = a.hamming(b)?;
    let fraction = if a.len() == 0 {
        0.0
    } else {
        count as f64 / a.len() as f64
    };
    Ok((count, fraction))
}

/// Distance statistics over a population of key pairs, in percent.
#[derive(Debug, Clone, PartialEq)]
pub struct HdReport {
    pub label: String,
    pub condition: OperatingCondition,
    pub mean_pct: f64,
    pub std_pct: f64,
    pub min_pct: f64,
    pub max_pct: f64,
    /// Number of distances aggregated.
    pub count: usize,
    /// Percentage of keys with distance above 1%.
    pub gt1_pct: f64,
    /// Percentage of keys with distance above 30%.
    pub gt30_pct: f64,
}

fn hd_report(label: String, condition: OperatingCondition, distances_pct: &[f64]) -> HdReport {
    let n = distances_pct.len() as f64;
    let mean = distances_pct.iter().sum::<f64>() / n;
    let var = distances_pct.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / n;
    let min = distances_pct.iter().copied().fold(f64::INFINITY, f64::min);
    let max = distances_pct.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let gt1 = distances_pct.iter().filter(|&&d| d > 1.0).count() as f64 / n;
    let gt30 = distances_pct.iter().filter(|&&d| d > 30.0).count() as f64 / n;
    HdReport {
        label,
        condition,
        mean_pct: mean,
        std_pct: libm::sqrt(var),
        min_pct: min,
        max_pct: max,
        count: distances_pct.len(),
        gt1_pct: 100.0 * gt1,
        gt30_pct: 100.0 * gt30,
    }
}

/// Diffuseness: inter-key distance within one bank, plus the mean key
/// Hamming weight.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusenessReport {
    pub hd: HdReport,
    pub mean_hamming_weight_pct: f64,
}

/// Pairwise inter-HD among the keys of one bank.
pub fn diffuseness_report(keys: &[KeyRecord]) -> Result<DiffusenessReport> {
    if keys.len() < 2 {
        return Err(Error::InsufficientData(alloc::format!(
            "diffuseness needs at least 2 keys, got {}",
            keys.len()
        )));
    }
    let mut distances = Vec::with_capacity(keys.len() * (keys.len() - 1) / 2);
    for i in 0..keys.len() {
        for j in i + 1..keys.len() {
            let (_, fraction) = hamming_distance(&keys[i].bits, &keys[j].bits)?;
            distances.push(100.0 * fraction);
        }
    }
    let mean_weight = keys
        .iter()
        .map(|k| 100.0 * k.bits.count_ones() as f64 / k.bits.len() as f64)
        .sum::<f64>()
        / keys.len() as f64;
    Ok(DiffusenessReport {
        hd: hd_report(String::from("diffuseness"), OperatingCondition::nvrt(), &distances),
        mean_hamming_weight_pct: mean_weight,
    })
}

/// Uniqueness: per-address distance between the keys of two banks. Keys
/// are paired by shared key address.
pub fn uniqueness_report(keys_a: &[KeyRecord], keys_b: &[KeyRecord]) -> Result<HdReport> {
    let mut distances = Vec::new();
    for key_a in keys_a {
        if let Some(key_b) = keys_b.iter().find(|k| k.key_address == key_a.key_address) {
            let (_, fraction) = hamming_distance(&key_a.bits, &key_b.bits)?;
            distances.push(100.0 * fraction);
        }
    }
    if distances.is_empty() {
        return Err(Error::InsufficientData(String::from(
            "no shared key addresses between the two banks",
        )));
    }
    Ok(hd_report(
        String::from("uniqueness"),
        OperatingCondition::nvrt(),
        &distances,
    ))
}

/// Reliability at one condition: intra-HD between fresh responses and the
/// reference keys, one response frame per campaign pattern, averaged per
/// key.
pub fn reliability_report(
    gds: &GoldenDataSet,
    condition: &OperatingCondition,
    responses: &[ReadoutFrame],
    key_length: usize,
) -> Result<HdReport> {
    if responses.is_empty() {
        return Err(Error::InsufficientData(String::from(
            "reliability needs at least one response frame",
        )));
    }
    for frame in responses {
        if frame.geometry != gds.geometry {
            return Err(Error::Consistency(String::from(
                "response frame geometry does not match the enrollment",
            )));
        }
    }
    let mut per_key = Vec::new();
    for &row in &gds.rows {
        let indices = gds.row_golden_indices(row)?;
        if indices.len() < key_length {
            continue;
        }
        let reference = extract_key(gds, row, key_length)?;
        let mut total_fraction = 0.0;
        for frame in responses {
            let mut mismatches = 0usize;
            for (k, &idx) in indices.iter().take(key_length).enumerate() {
                if frame.bits.get(idx) != reference.bits.get(k) {
                    mismatches += 1;
                }
            }
            total_fraction += mismatches as f64 / key_length as f64;
        }
        per_key.push(100.0 * total_fraction / responses.len() as f64);
    }
    if per_key.is_empty() {
        return Err(Error::InsufficientData(alloc::format!(
            "no qualified row holds {key_length} golden cells"
        )));
    }
    Ok(hd_report(
        alloc::format!("reliability:{}", condition.label),
        *condition,
        &per_key,
    ))
}

/// Jaccard similarity of two failed-bit sets over the same cell universe.
#[derive(Debug, Clone, PartialEq)]
pub struct JaccardReport {
    pub label_a: String,
    pub label_b: String,
    pub intersection: usize,
    pub union: usize,
    pub jaccard: f64,
    /// Both sets empty: similarity is defined as 1 and flagged.
    pub degenerate: bool,
}

/// Exact set arithmetic on failed-bit sets; the universes (bit-string
/// lengths) must match.
pub fn jaccard_index(a: &BitMatrix, b: &BitMatrix, label_a: &str, label_b: &str) -> Result<JaccardReport> {
    if a.len() != b.len() {
        return Err(Error::Consistency(alloc::format!(
            "failed-bit sets cover different universes: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let intersection = a.intersection_count(b)?;
    let union = a.union_count(b)?;
    let degenerate = union == 0;
    let jaccard = if degenerate {
        1.0
    } else {
        intersection as f64 / union as f64
    };
    Ok(JaccardReport {
        label_a: String::from(label_a),
        label_b: String::from(label_b),
        intersection,
        union,
        jaccard,
        degenerate,
    })
}

/// One condition pair of the robustness comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessRow {
    pub reference: OperatingCondition,
    pub other: OperatingCondition,
    pub precharge_latency: JaccardReport,
    pub retention: JaccardReport,
}

/// Compare failed-bit reproducibility across conditions for the
/// precharge-latency mechanism and the retention baseline.
///
/// The first condition is the reference (normally NVRT). The retention
/// interval is calibrated once at the reference so that the expected
/// failure fraction reaches `retention_target`, then held for all
/// conditions. Precharge-latency failed sets are the union over a full
/// (patterns x repeats) campaign read with session drift.
pub fn robustness_comparison(
    bank: &SimulatedBank,
    conditions: &[OperatingCondition],
    patterns: &[u8],
    repeats: usize,
    retention_target: f64,
    noise_seed: u64,
) -> Result<Vec<RobustnessRow>> {
    if conditions.len() < 2 {
        return Err(Error::InsufficientData(String::from(
            "robustness comparison needs a reference and at least one other condition",
        )));
    }
    let interval = bank.calibrate_interval(retention_target, &conditions[0])?;
    let t_rp_puf = bank.profile().trp.puf_ns;

    let mut prelat_sets = Vec::with_capacity(conditions.len());
    let mut retention_sets = Vec::with_capacity(conditions.len());
    for (i, condition) in conditions.iter().enumerate() {
        let source = SimulatedSource {
            bank,
            t_rp_puf_ns: t_rp_puf,
            condition: *condition,
            noise: NoiseMode::SeededWithDrift(derive(noise_seed, D_ROBUST_PRELAT, i as u64)),
        };
        let ms = run_campaign(&source, patterns, repeats, t_rp_puf)?;
        prelat_sets.push(ms.failed_bit_set());
        retention_sets.push(bank.retention_failed_set(
            interval,
            condition,
            NoiseMode::Seeded(derive(noise_seed, D_ROBUST_RETENTION, i as u64)),
        )?);
    }

    let mut rows = Vec::new();
    for i in 1..conditions.len() {
        let ref_label = alloc::format!("{}", conditions[0].label);
        let other_label = alloc::format!("{}", conditions[i].label);
        rows.push(RobustnessRow {
            reference: conditions[0],
            other: conditions[i],
            precharge_latency: jaccard_index(
                &prelat_sets[0],
                &prelat_sets[i],
                &ref_label,
                &other_label,
            )?,
            retention: jaccard_index(
                &retention_sets[0],
                &retention_sets[i],
                &ref_label,
                &other_label,
            )?,
        });
    }
    Ok(rows)
}
