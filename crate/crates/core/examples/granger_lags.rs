//! Runs the lag-by-lag Granger test on a coupled pair and on two independent
//! series, printing the F statistic and p-value for each lag.
//!
//!     cargo run --example granger_lags [-- <coupling>]

use borrowscope::granger::{granger_test, GrangerResult};
use borrowscope::synth::{gen_granger_pair, GrangerScenario};

fn print(label: &str, r: &GrangerResult) {
    println!("{label}: causal {} over {} lags", r.causal, r.max_lag_used);
    for l in &r.per_lag {
        println!("  lag {:>2}  F({}, {:>3}) = {:8.3}  p = {:.3e}", l.lag, l.df1, l.df2, l.f_stat, l.p_value);
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let coupling: f64 = std::env::args().nth(1).map_or(Ok(0.6), |s| s.parse())?;
    let scenario = GrangerScenario {
        coupling,
        lag: 2,
        length: 120,
        noise_sigma: 1.0,
        seed: 11,
    };
    let (target, predictor) = gen_granger_pair(&scenario)?;
    print("predictor -> target", &granger_test(&target, &predictor, 6, 0.05)?);
    print("target -> predictor", &granger_test(&predictor, &target, 6, 0.05)?);

    // 20 points only allow lags up to 6
    let short = granger_test(&target[..20], &predictor[..20], 10, 0.05)?;
    print("short series, 10 lags requested", &short);
    Ok(())
}
