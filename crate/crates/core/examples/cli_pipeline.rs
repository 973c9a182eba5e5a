// Drive the command line end to end on a synthetic corpus: audit, group,
// tune, resample, eval, report.

use std::error::Error;

use kie_leakage::cli::{run, EXIT_LEAKAGE, EXIT_OK};
use kie_leakage::corpus::write_corpus_tree;
use kie_leakage::synthetic::near_template_forms;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let (corpus, truth) = near_template_forms(4);
    let work = tempfile::tempdir()?;
    let data = work.path().join("data");
    let out = work.path().join("out");
    write_corpus_tree(&corpus, &data)?;
    let gt = work.path().join("truth.json");
    std::fs::write(&gt, serde_json::json!({ "groups": truth }).to_string())?;
    let config = work.path().join("run.conf");
    std::fs::write(
        &config,
        format!(
            "dataset = funsd\ndata_root = {}\noutput_dir = {}\nground_truth = {}\nseed = 7\nratios = 0.5,0.25,0.25\n",
            data.display(),
            out.display(),
            gt.display()
        ),
    )?;
    let conf = config.to_str().expect("utf-8 path");
    for (cmd, expected) in [
        ("audit", EXIT_LEAKAGE),
        ("group", EXIT_OK),
        ("tune", EXIT_OK),
        ("resample", EXIT_OK),
        ("eval", EXIT_OK),
        ("report", EXIT_OK),
    ] {
        let code = run(["kie-leakage", cmd, "--config", conf]);
        println!("{cmd}: exit {code}");
        assert_eq!(code, expected);
    }
    print!("{}", std::fs::read_to_string(out.join("summary.md"))?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
