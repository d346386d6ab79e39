use outlab::rng::CounterRng;
use outlab_cli::output::RESULT_HEADER;
use outlab_cli::summarize::summarize_text;

const GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/summarize_golden.csv");

/// Twenty paths of `1/n` plus uniform noise of width 0.01 from a pinned
/// stream, and one path truncated after n = 2.
fn synthetic_results() -> String {
    let rng = CounterRng::new(20240, 0);
    let mut text = format!("# synthetic\n{RESULT_HEADER}\n");
    for pid in 0..20u64 {
        for (k, n) in [1u64, 2, 4, 8, 16].into_iter().enumerate() {
            let noise = (rng.f64_at(pid * 8 + k as u64) - 0.5) * 1e-2;
            text.push_str(&format!("synthetic,{pid},{n},drift,{},ok\n", 1.0 / n as f64 + noise));
        }
    }
    text.push_str("synthetic,20,1,drift,1.003,ok\nsynthetic,20,2,drift,0.498,ok\nsynthetic,20,3,path,,truncated\n");
    text
}

#[test]
fn summary_matches_golden_file() {
    let summary = summarize_text(&synthetic_results()).unwrap();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(GOLDEN, &summary).unwrap();
    }
    let golden = std::fs::read_to_string(GOLDEN).expect("golden file present");
    assert_eq!(summary, golden);
}

#[test]
fn golden_row_agrees_with_direct_statistics() {
    let rng = CounterRng::new(20240, 0);
    let values: Vec<f64> = (0..20u64)
        .map(|pid| 1.0 / 16.0 + (rng.f64_at(pid * 8 + 4) - 0.5) * 1e-2)
        .collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let median = (sorted[9] + sorted[10]) / 2.0;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    // twenty paths form twenty batches of one; t quantile 0.975 with 19 d.o.f.
    let halfwidth = 2.093_024_054_408_263 * sd / n.sqrt();

    let golden = std::fs::read_to_string(GOLDEN).unwrap();
    let row: Vec<f64> = golden
        .lines()
        .find(|l| l.starts_with("synthetic,drift,16,"))
        .unwrap()
        .split(',')
        .skip(3)
        .map(|f| f.parse().unwrap())
        .collect();
    assert!((row[0] - mean).abs() < 1e-14);
    assert!((row[1] - median).abs() < 1e-14);
    assert!((row[2] - halfwidth).abs() < 1e-9 * halfwidth);
    assert_eq!(row[3], 20.0);
    // the truncated path still counts where it has values
    assert!(golden.lines().any(|l| l.starts_with("synthetic,drift,2,") && l.ends_with(",21")));
}
