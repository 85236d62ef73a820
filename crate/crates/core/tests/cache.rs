use std::fs;

use magiclattice::arith::{EisensteinInt, GaussianInt};
use magiclattice::lattice::{build_lattice, enumerate_shell, LatticeName, DEFAULT_NODE_BUDGET};
use magiclattice::pipeline::{
    cache_path, load_or_enumerate, read_shell_cache, write_shell_cache, PipelineConfig,
    ShellSource, ShellStore, CACHE_ENV,
};
use magiclattice::state::dedup;
use magiclattice::Error;

#[test]
fn round_trip_preserves_states() {
    let dir = tempfile::tempdir().unwrap();
    for (l, norm) in [(LatticeName::E8, 4), (LatticeName::BW16, 4)] {
        let spec = build_lattice(l).unwrap();
        let (fresh, src) =
            load_or_enumerate(&spec, norm, Some(dir.path()), DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(src, ShellSource::Enumerated);
        let (loaded, src) =
            load_or_enumerate(&spec, norm, Some(dir.path()), DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(src, ShellSource::Cache);
        assert_eq!(fresh.vectors, loaded.vectors);
        let a = dedup::<GaussianInt>(&fresh).unwrap();
        let b = dedup::<GaussianInt>(&loaded).unwrap();
        assert_eq!(a.states, b.states);
    }

    let spec = build_lattice(LatticeName::E6).unwrap();
    let fresh = enumerate_shell(&spec, 6).unwrap();
    let path = cache_path(dir.path(), LatticeName::E6, 6);
    write_shell_cache(&spec, &fresh, &path).unwrap();
    let loaded = read_shell_cache(&spec, 6, &path).unwrap();
    assert_eq!(fresh.vectors, loaded.vectors);
    assert_eq!(
        dedup::<EisensteinInt>(&fresh).unwrap().states,
        dedup::<EisensteinInt>(&loaded).unwrap().states
    );
}

#[test]
fn file_layout() {
    let dir = tempfile::tempdir().unwrap();
    let spec = build_lattice(LatticeName::E6).unwrap();
    let shell = enumerate_shell(&spec, 3).unwrap();
    let path = dir.path().join("e6.shell");
    write_shell_cache(&spec, &shell, &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        format!(
            "#magiclattice-shell v1 lattice=E6 norm=3 scale={} count=72",
            spec.scale
        )
    );
    let rows: Vec<Vec<i64>> = lines
        .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 72);
    assert!(rows.iter().all(|r| r.len() == 6));
    assert!(rows.windows(2).all(|w| w[0] < w[1]));
}

type Edit = Box<dyn Fn(&str) -> String>;

fn corrupt(edit: impl Fn(&str) -> String) -> Error {
    let dir = tempfile::tempdir().unwrap();
    let spec = build_lattice(LatticeName::E8).unwrap();
    let shell = enumerate_shell(&spec, 2).unwrap();
    let path = dir.path().join("x.shell");
    write_shell_cache(&spec, &shell, &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    fs::write(&path, edit(&text)).unwrap();
    read_shell_cache(&spec, 2, &path).unwrap_err()
}

#[test]
fn corrupted_caches_are_rejected() {
    let cases: Vec<(&str, Edit)> = vec![
        (
            "count",
            Box::new(|t: &str| t.replacen("count=240", "count=241", 1)),
        ),
        (
            "lattice",
            Box::new(|t: &str| t.replacen("lattice=E8", "lattice=BW16", 1)),
        ),
        (
            "norm",
            Box::new(|t: &str| t.replacen("norm=2", "norm=4", 1)),
        ),
        ("magic", Box::new(|t: &str| t.replacen("v1", "v2", 1))),
        (
            "dropped line",
            Box::new(|t: &str| t.lines().take(240).collect::<Vec<_>>().join("\n")),
        ),
        (
            "wrong norm",
            Box::new(|t: &str| {
                let mut l: Vec<String> = t.lines().map(String::from).collect();
                l[1] = "4 0 0 0 0 0 0 0".into();
                l.join("\n")
            }),
        ),
        (
            "not in lattice",
            Box::new(|t: &str| {
                // right norm, but the half-integer coordinates sum to an odd integer
                let mut l: Vec<String> = t.lines().map(String::from).collect();
                l[1] = "1 1 1 1 1 1 1 -1".into();
                l.join("\n")
            }),
        ),
        (
            "duplicate",
            Box::new(|t: &str| {
                let mut l: Vec<String> = t.lines().map(String::from).collect();
                l[2] = l[1].clone();
                l.join("\n")
            }),
        ),
    ];
    for (name, edit) in cases {
        match corrupt(edit) {
            Error::Cache { .. } => {}
            other => panic!("{name}: unexpected error {other}"),
        }
    }
}

#[test]
fn environment_overrides_cache_dir() {
    let dir = tempfile::tempdir().unwrap();
    let other = tempfile::tempdir().unwrap();
    std::env::set_var(CACHE_ENV, dir.path());
    let mut cfg = PipelineConfig::new(LatticeName::E8);
    cfg.cache_dir = Some(other.path().to_path_buf());
    assert_eq!(cfg.resolved_cache_dir().as_deref(), Some(dir.path()));
    let mut store = ShellStore::new(&cfg);
    store.shell(LatticeName::E8, 2).unwrap();
    std::env::remove_var(CACHE_ENV);
    assert!(cache_path(dir.path(), LatticeName::E8, 2).exists());
    assert!(!cache_path(other.path(), LatticeName::E8, 2).exists());
}
