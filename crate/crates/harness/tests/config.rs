use std::f64::consts::PI;
use std::io::Write;

use liouville_harness::config::{load, parse_overrides, Profile};

fn ov(args: &[&str]) -> Vec<(String, String)> {
    parse_overrides(&args.iter().map(|s| s.to_string()).collect::<Vec<_>>()).unwrap()
}

#[test]
fn defaults_validate() {
    let c = load(None, "gmc", &[]).unwrap();
    assert_eq!(c.profile, Profile::Desk);
    assert_eq!(c.gmc.beta2, PI);
    assert_eq!(c.heat.dt, 1.0 / 16.0);
}

#[test]
fn bare_keys_go_to_the_subcommand_section() {
    let c = load(None, "gmc", &ov(&["--beta2", "3.14159", "--p", "2", "--alpha=0.5", "--samples", "10000"])).unwrap();
    assert_eq!(c.gmc.beta2, 3.14159);
    assert_eq!(c.gmc.p, 2.0);
    assert_eq!(c.gmc.alpha, 0.5);
    assert_eq!(c.gmc.samples, 10000);
}

#[test]
fn uppercase_keys_and_top_level_keys() {
    let c = load(None, "sigma", &ov(&["--N", "128", "--scheme", "sharp", "--seed", "7", "--profile", "test"])).unwrap();
    assert_eq!(c.sigma.n, Some(128));
    assert_eq!(c.seed, 7);
    assert_eq!(c.profile, Profile::Test);
}

#[test]
fn dotted_keys_reach_other_sections() {
    let c = load(None, "all", &ov(&["--heat.lambda", "2", "--gmc.ladder", "[8, 16]"])).unwrap();
    assert_eq!(c.heat.lambda, 2.0);
    assert_eq!(c.gmc.ladder, vec![8, 16]);
}

#[test]
fn file_then_overrides() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "seed = 11\n[wave]\nn = 4\nbeta2 = 2.0\n").unwrap();
    let c = load(Some(f.path()), "wave", &ov(&["--beta2", "1.5"])).unwrap();
    assert_eq!(c.seed, 11);
    assert_eq!(c.wave.n, 4);
    assert_eq!(c.wave.beta2, 1.5);
}

#[test]
fn invalid_values_name_the_field() {
    let e = load(None, "gmc", &ov(&["--beta2", "20"])).unwrap_err();
    assert!(e.0.contains("gmc.beta2"), "{}", e.0);
    let e = load(None, "heat", &ov(&["--scheme", "gaussian"])).unwrap_err();
    assert!(e.0.contains("heat.scheme"), "{}", e.0);
    let e = load(None, "heat", &ov(&["--bogus", "1"])).unwrap_err();
    assert!(e.0.contains("bogus"), "{}", e.0);
    let e = load(None, "gmc", &ov(&["--tasks", "[\"mean\", \"nope\"]"])).unwrap_err();
    assert!(e.0.contains("nope"), "{}", e.0);
}

#[test]
fn malformed_file_reports_location() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "[heat]\nn = = 3").unwrap();
    let e = load(Some(f.path()), "heat", &[]).unwrap_err();
    assert!(e.0.contains("line 2"), "{}", e.0);
}

#[test]
fn override_syntax_errors() {
    assert!(parse_overrides(&["beta2".to_string()]).is_err());
    assert!(parse_overrides(&["--beta2".to_string()]).is_err());
}
