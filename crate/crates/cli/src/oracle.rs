use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use subjex::mincut::{
    brute_force_min, AssociationScores, FlowNetwork, IndividualScores, DEFAULT_SCALE,
};

pub struct Counterexample {
    pub trial: usize,
    pub individual: Vec<f64>,
    pub association: Vec<(usize, usize, f64)>,
    pub flow_side: Vec<usize>,
    pub flow_value: i64,
    pub oracle_side: Vec<usize>,
    pub oracle_value: i64,
}

pub struct OracleSummary {
    pub trials: usize,
    pub fixture_cost: f64,
    pub fixture_side: Vec<usize>,
    pub counterexample: Option<Counterexample>,
}

fn fixture() -> (IndividualScores, AssociationScores) {
    let ind = IndividualScores::from_probabilities(&[0.8, 0.5, 0.1]);
    let mut assoc = AssociationScores::new();
    for (i, k, w) in [(0, 1, 1.0), (0, 2, 0.1), (1, 2, 0.2)] {
        assoc.insert(i, k, w).expect("valid fixture");
    }
    (ind, assoc)
}

fn check(
    ind: &IndividualScores,
    assoc: &AssociationScores,
    trial: usize,
) -> subjex::Result<Option<Counterexample>> {
    let flow = FlowNetwork::build(ind, assoc, DEFAULT_SCALE)?.min_cut();
    let oracle = brute_force_min(ind, assoc, DEFAULT_SCALE)?;
    if flow.max_flow_value == oracle.max_flow_value {
        return Ok(None);
    }
    Ok(Some(Counterexample {
        trial,
        individual: ind.iter().map(|p| p.source).collect(),
        association: assoc.iter().collect(),
        flow_side: flow.source_side,
        flow_value: flow.max_flow_value,
        oracle_side: oracle.source_side,
        oracle_value: oracle.max_flow_value,
    }))
}

/// Max-flow against exhaustive search on the worked example plus `trials`
/// random instances with up to `n_max` items.
pub fn run(n_max: usize, trials: usize, seed: u64) -> subjex::Result<OracleSummary> {
    let (ind, assoc) = fixture();
    let fixture_cut = FlowNetwork::build(&ind, &assoc, DEFAULT_SCALE)?.min_cut();
    let mut counterexample = check(&ind, &assoc, 0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 1..=trials {
        if counterexample.is_some() {
            break;
        }
        let n = rng.gen_range(1..=n_max.max(1));
        let probs: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
        let ind = IndividualScores::from_probabilities(&probs);
        let density: f64 = rng.gen_range(0.1..0.6);
        let mut assoc = AssociationScores::new();
        for i in 0..n {
            for k in i + 1..n {
                if rng.gen_bool(density) {
                    assoc.insert(i, k, rng.gen())?;
                }
            }
        }
        counterexample = check(&ind, &assoc, trial)?;
    }
    Ok(OracleSummary {
        trials,
        fixture_cost: fixture_cut.cost,
        fixture_side: fixture_cut.source_side,
        counterexample,
    })
}
