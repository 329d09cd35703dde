//! Writes a small corpus of synthetic classification datasets as .dat files,
//! ready for the CLI. Usage: generate_data [OUT_DIR] (default ./data).

use metais::dataset::write_keel;
use metais::synth;

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "data".to_string());
    let dir = std::path::Path::new(&out);
    std::fs::create_dir_all(dir).expect("create output directory");

    let datasets = vec![
        synth::banana(5300, 77).expect("banana"),
        synth::twonorm(1400, 78).expect("twonorm"),
        synth::ringnorm(1400, 79).expect("ringnorm"),
        synth::moons(1000, 0.25, 80).expect("moons"),
        synth::blobs(900, 3, 4, 1.3, 81).expect("blobs"),
        synth::spirals(1000, 0.2, 82).expect("spirals"),
    ];
    for d in &datasets {
        let path = dir.join(format!("{}.dat", d.name()));
        write_keel(d, &path).expect("write dataset");
        println!(
            "{}  ({} rows, {} features, {} classes)",
            path.display(),
            d.n_rows(),
            d.n_features(),
            d.n_classes()
        );
    }
}
