//! Rank correlation and paired t-tests.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-sided 0.05 critical values of Student's t for 1 to 200 degrees of
/// freedom.
const T_CRITICAL_975: [f64; 200] = [
    12.706204736432,
    4.302652729696,
    3.182446305284,
    2.776445105198,
    2.570581835636,
    2.446911851145,
    2.364624251593,
    2.306004135204,
    2.262157162854,
    2.228138851965,
    2.200985160083,
    2.178812829663,
    2.160368656461,
    2.144786687917,
    2.131449545559,
    2.119905299221,
    2.109815577833,
    2.100922040241,
    2.093024054408,
    2.085963447266,
    2.079613844728,
    2.073873067904,
    2.068657610419,
    2.063898561628,
    2.059538552753,
    2.055529438643,
    2.051830516480,
    2.048407141795,
    2.045229642133,
    2.042272456301,
    2.039513446396,
    2.036933343460,
    2.034515297449,
    2.032244509318,
    2.030107928250,
    2.028094000980,
    2.026192463029,
    2.024394163912,
    2.022690920037,
    2.021075390306,
    2.019540970441,
    2.018081702818,
    2.016692199228,
    2.015367574444,
    2.014103388881,
    2.012895598919,
    2.011740513730,
    2.010634757624,
    2.009575237129,
    2.008559112101,
    2.007583770316,
    2.006646805062,
    2.005745995318,
    2.004879288188,
    2.004044783289,
    2.003240718848,
    2.002465459291,
    2.001717484145,
    2.000995378088,
    2.000297822014,
    1.999623584995,
    1.998971517033,
    1.998340542521,
    1.997729654318,
    1.997137908392,
    1.996564418952,
    1.996008354025,
    1.995468931430,
    1.994945415107,
    1.994437111771,
    1.993943367846,
    1.993463566662,
    1.992997125890,
    1.992543495181,
    1.992102154002,
    1.991672609645,
    1.991254395388,
    1.990847068812,
    1.990450210230,
    1.990063421254,
    1.989686323457,
    1.989318557137,
    1.988959780175,
    1.988609666976,
    1.988267907477,
    1.987934206239,
    1.987608281589,
    1.987289864831,
    1.986978699506,
    1.986674540704,
    1.986377154419,
    1.986086316951,
    1.985801814346,
    1.985523441867,
    1.985251003509,
    1.984984311531,
    1.984723186027,
    1.984467454427,
    1.984216951509,
    1.983971518450,
    1.983731002885,
    1.983495258496,
    1.983264144710,
    1.983037526423,
    1.982815273737,
    1.982597261710,
    1.982383370123,
    1.982173483257,
    1.981967489688,
    1.981765282087,
    1.981566757031,
    1.981371814834,
    1.981180359375,
    1.980992297938,
    1.980807541067,
    1.980626002424,
    1.980447598650,
    1.980272249241,
    1.980099876426,
    1.979930405053,
    1.979763762477,
    1.979599878459,
    1.979438685067,
    1.979280116580,
    1.979124109400,
    1.978970601967,
    1.978819534681,
    1.978670849816,
    1.978524491459,
    1.978380405427,
    1.978238539211,
    1.978098841906,
    1.977961264150,
    1.977825758070,
    1.977692277223,
    1.977560776543,
    1.977431212293,
    1.977303542013,
    1.977177724476,
    1.977053719643,
    1.976931488621,
    1.976810993620,
    1.976692197917,
    1.976575065819,
    1.976459562621,
    1.976345654583,
    1.976233308885,
    1.976122493603,
    1.976013177679,
    1.975905330887,
    1.975798923809,
    1.975693927806,
    1.975590314996,
    1.975488058226,
    1.975387131047,
    1.975287507695,
    1.975189163069,
    1.975092072705,
    1.974996212760,
    1.974901559994,
    1.974808091745,
    1.974715785917,
    1.974624620960,
    1.974534575852,
    1.974445630086,
    1.974357763652,
    1.974270957022,
    1.974185191138,
    1.974100447394,
    1.974016707626,
    1.973933954098,
    1.973852169490,
    1.973771336883,
    1.973691439751,
    1.973612461950,
    1.973534387702,
    1.973457201590,
    1.973380888545,
    1.973305433837,
    1.973230823068,
    1.973157042155,
    1.973084077332,
    1.973011915133,
    1.972940542386,
    1.972869946207,
    1.972800113992,
    1.972731033406,
    1.972662692378,
    1.972595079097,
    1.972528181998,
    1.972461989764,
    1.972396491313,
    1.972331675793,
    1.972267532579,
    1.972204051266,
    1.972141221659,
    1.972079033776,
    1.972017477834,
    1.971956544249,
    1.971896223632,
];

/// Standard normal 0.975 quantile, used beyond the table.
const Z_975: f64 = 1.959963984540054;

/// Two-sided critical value of Student's t at the 0.05 level.
pub fn t_critical_two_sided_05(df: usize) -> f64 {
    assert!(df >= 1, "t distribution needs at least one degree of freedom");
    T_CRITICAL_975.get(df - 1).copied().unwrap_or(Z_975)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub rho: f64,
    pub n: usize,
    /// Two-sided test of `rho != 0` at the 0.05 level.
    pub significant: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t: f64,
    pub df: usize,
    pub significant: bool,
    /// The differences had zero variance; `t` is then 0 or infinite.
    pub degenerate: bool,
}

/// Ranks starting at 1, with tied values sharing their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start..end hold ranks start+1 ..= end.
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

fn check_pairs(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "paired samples differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::InvalidArgument("at least two pairs are required".into()));
    }
    Ok(())
}

/// Spearman's rho: the Pearson correlation of average ranks. Significance
/// uses `t = rho * sqrt((n - 2) / (1 - rho^2))` on `n - 2` degrees of
/// freedom.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    check_pairs(x, y)?;
    let rho = pearson(&average_ranks(x), &average_ranks(y))
        .ok_or(Error::UndefinedCorrelation("a sample has no rank variance"))?;
    let n = x.len();
    let significant = if n <= 2 {
        false
    } else if rho.abs() >= 1.0 {
        true
    } else {
        let t = rho * ((n - 2) as f64 / (1.0 - rho * rho)).sqrt();
        t.abs() > t_critical_two_sided_05(n - 2)
    };
    Ok(CorrelationResult { rho, n, significant })
}

/// Two-sided permutation p-value for Spearman's rho: the share of
/// permutations of `y` whose |rho| is at least the observed one (the
/// observed arrangement counts as one permutation).
pub fn spearman_permutation_p(x: &[f64], y: &[f64], permutations: usize, seed: u64) -> Result<f64> {
    let observed = spearman(x, y)?.rho.abs();
    let rx = average_ranks(x);
    let mut ry = average_ranks(y);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut extreme = 1usize;
    for _ in 0..permutations {
        ry.shuffle(&mut rng);
        let rho = pearson(&rx, &ry).expect("rank variance is permutation invariant");
        if rho.abs() >= observed - 1e-12 {
            extreme += 1;
        }
    }
    Ok(extreme as f64 / (permutations + 1) as f64)
}

/// Paired t-test on `a - b`, two-sided at the 0.05 level.
///
/// Zero variance in the differences is reported as degenerate: `t = 0`
/// and not significant when the mean difference is zero, otherwise an
/// infinite `t` that counts as significant.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    check_pairs(a, b)?;
    let n = a.len();
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let df = n - 1;
    if var == 0.0 {
        return Ok(if mean == 0.0 {
            TTestResult {
                t: 0.0,
                df,
                significant: false,
                degenerate: true,
            }
        } else {
            TTestResult {
                t: mean.signum() * f64::INFINITY,
                df,
                significant: true,
                degenerate: true,
            }
        });
    }
    let t = mean / (var / n as f64).sqrt();
    Ok(TTestResult {
        t,
        df,
        significant: t.abs() > t_critical_two_sided_05(df),
        degenerate: false,
    })
}
