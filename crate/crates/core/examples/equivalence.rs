//! Runs the equivalence experiment on random tuples and summarizes it.
//!
//!     cargo run --release --example equivalence -- [p] [n] [m] [count] [seed]

use pbasis::oracle::{equivalence_experiment, ExperimentParams};

fn main() -> pbasis::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let arg = |k: usize, default: u64| args.get(k).copied().unwrap_or(default);
    let params = ExperimentParams {
        p: arg(0, 2) as u32,
        n: arg(1, 2) as usize,
        m: arg(2, 1) as usize,
        count: arg(3, 100) as usize,
        seed: arg(4, 0),
        sentinels: true,
        ..Default::default()
    };
    let start = std::time::Instant::now();
    let reports = equivalence_experiment(&params)?;
    let unit = reports.iter().filter(|r| r.dgcd_unit).count();
    let witnessed = reports.iter().filter(|r| !r.witnesses.is_empty()).count();
    let exhausted = reports.iter().filter(|r| r.exhausted).count();
    let candidates = reports.iter().filter(|r| r.candidate_iv).count();
    let bad: Vec<_> = reports.iter().filter(|r| !r.verdict_consistent).collect();
    println!("{} tuples: {unit} with unit dgcd, {witnessed} with a witness, {exhausted} exhausted", reports.len());
    println!("translate-only candidates: {candidates}");
    for r in &bad {
        println!("INCONSISTENT {}", r.record().to_json_line());
    }
    println!("{} inconsistent, {:.1?}", bad.len(), start.elapsed());
    Ok(())
}
