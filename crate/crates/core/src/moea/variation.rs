//! Real-coded variation on the unit box: bounded simulated binary crossover
//! and polynomial mutation.

use rand::Rng;

use crate::evaluate::Genome;

const EPS: f64 = 1e-14;

fn sbx_spread(beta: f64, u: f64, eta: f64) -> f64 {
    let alpha = 2.0 - beta.powf(-(eta + 1.0));
    if u <= 1.0 / alpha {
        (u * alpha).powf(1.0 / (eta + 1.0))
    } else {
        (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
    }
}

/// Bounded SBX. With probability `1 - prob` (or for genes where the parents
/// agree) the children copy the parents.
pub fn sbx_crossover<R: Rng + ?Sized>(
    parent1: &Genome,
    parent2: &Genome,
    eta_c: f64,
    prob: f64,
    rng: &mut R,
) -> (Genome, Genome) {
    let mut c1 = parent1.0.clone();
    let mut c2 = parent2.0.clone();
    if rng.gen::<f64>() >= prob {
        return (Genome(c1), Genome(c2));
    }
    for i in 0..c1.len() {
        if rng.gen::<f64>() > 0.5 {
            continue;
        }
        let (a, b) = (parent1.0[i], parent2.0[i]);
        if (a - b).abs() <= EPS {
            continue;
        }
        let (y1, y2) = if a < b { (a, b) } else { (b, a) };
        let u = rng.gen::<f64>();
        let span = y2 - y1;

        let beta_low = 1.0 + 2.0 * y1 / span;
        let low = 0.5 * ((y1 + y2) - sbx_spread(beta_low, u, eta_c) * span);
        let beta_high = 1.0 + 2.0 * (1.0 - y2) / span;
        let high = 0.5 * ((y1 + y2) + sbx_spread(beta_high, u, eta_c) * span);
        let (low, high) = (low.clamp(0.0, 1.0), high.clamp(0.0, 1.0));

        if rng.gen::<f64>() <= 0.5 {
            c1[i] = high;
            c2[i] = low;
        } else {
            c1[i] = low;
            c2[i] = high;
        }
    }
    (Genome(c1), Genome(c2))
}

/// Bounded polynomial mutation; each gene mutates independently with
/// probability `p_m`.
pub fn polynomial_mutation<R: Rng + ?Sized>(genome: &Genome, eta_m: f64, p_m: f64, rng: &mut R) -> Genome {
    let power = 1.0 / (eta_m + 1.0);
    let genes = genome
        .0
        .iter()
        .map(|&y| {
            if rng.gen::<f64>() >= p_m {
                return y;
            }
            let u = rng.gen::<f64>();
            let delta_q = if u <= 0.5 {
                let xy = 1.0 - y;
                let val = 2.0 * u + (1.0 - 2.0 * u) * xy.powf(eta_m + 1.0);
                val.powf(power) - 1.0
            } else {
                let xy = y;
                let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy.powf(eta_m + 1.0);
                1.0 - val.powf(power)
            };
            (y + delta_q).clamp(0.0, 1.0)
        })
        .collect();
    Genome(genes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(v: &[f64]) -> Genome {
        Genome(v.to_vec())
    }

    #[test]
    fn identical_parents_give_identical_children() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = g(&[0.1, 0.5, 0.9, 0.0, 1.0]);
        let (a, b) = sbx_crossover(&p, &p, 15.0, 1.0, &mut rng);
        assert_eq!(a, p);
        assert_eq!(b, p);
    }

    #[test]
    fn zero_probability_copies_parents() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (p1, p2) = (g(&[0.1, 0.2]), g(&[0.8, 0.7]));
        let (a, b) = sbx_crossover(&p1, &p2, 15.0, 0.0, &mut rng);
        assert_eq!((a, b), (p1.clone(), p2));
        assert_eq!(polynomial_mutation(&p1, 20.0, 0.0, &mut rng), p1);
    }

    #[test]
    fn seeded_offspring_repeat() {
        let (p1, p2) = (g(&[0.1, 0.2, 0.3, 0.4]), g(&[0.9, 0.6, 0.35, 0.0]));
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            let (a, b) = sbx_crossover(&p1, &p2, 15.0, 0.9, &mut rng);
            (polynomial_mutation(&a, 20.0, 0.5, &mut rng), polynomial_mutation(&b, 20.0, 0.5, &mut rng))
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn crossover_preserves_gene_sums_when_unclipped() {
        // SBX children are symmetric about the parents' mean.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (p1, p2) = (g(&[0.4, 0.45]), g(&[0.6, 0.55]));
        let (a, b) = sbx_crossover(&p1, &p2, 30.0, 1.0, &mut rng);
        for i in 0..2 {
            assert!((a.0[i] + b.0[i] - (p1.0[i] + p2.0[i])).abs() < 1e-12);
        }
    }
}
