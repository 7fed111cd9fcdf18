use std::path::Path;
use std::process::{Command, Output};

fn pcc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcc")).args(args).output().expect("run pcc")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn text_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("msg.txt");
    let packed = dir.path().join("msg.pcc");
    let output = dir.path().join("out.txt");
    std::fs::write(&input, "1 2 3 1 4 1 5 1 2 3 1").unwrap();
    let enc = pcc(&["encode", path(&input), path(&packed)]);
    assert!(enc.status.success());
    assert!(String::from_utf8_lossy(&enc.stderr).contains("bits="));
    assert!(std::fs::read(&packed).unwrap().starts_with(b"PCC1\x01"));
    assert!(pcc(&["decode", path(&packed), path(&output)]).status.success());
    assert_eq!(std::fs::read_to_string(&output).unwrap(), "1 2 3 1 4 1 5 1 2 3 1\n");
}

#[test]
fn empty_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.txt");
    let packed = dir.path().join("empty.pcc");
    let output = dir.path().join("out.txt");
    std::fs::write(&input, "").unwrap();
    assert!(pcc(&["encode", path(&input), path(&packed)]).status.success());
    assert!(pcc(&["decode", path(&packed), path(&output)]).status.success());
    assert!(std::fs::read(&output).unwrap().is_empty());
}

#[test]
fn byte_mode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("blob.bin");
    let packed = dir.path().join("blob.pcc");
    let output = dir.path().join("blob.out");
    let mut state = 12345u32;
    let data: Vec<u8> = (0..20_000)
        .map(|_| {
            state = state.wrapping_mul(1_103_515_245).wrapping_add(12_345);
            // skewed bytes so the file actually compresses
            ((state >> 16) % 256).min((state >> 8) % 17) as u8
        })
        .collect();
    std::fs::write(&input, &data).unwrap();
    assert!(pcc(&["encode", "--mode", "bytes", path(&input), path(&packed)]).status.success());
    assert!(pcc(&["decode", "--mode", "bytes", path(&packed), path(&output)]).status.success());
    assert_eq!(std::fs::read(&output).unwrap(), data);
}

#[test]
fn zero_symbol_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("zero.txt");
    std::fs::write(&input, "0").unwrap();
    let out = pcc(&["encode", path(&input), path(&dir.path().join("z.pcc"))]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn corrupt_containers_fail() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("msg.txt");
    let packed = dir.path().join("msg.pcc");
    std::fs::write(&input, "5 5 6 5 9 9 9 1").unwrap();
    assert!(pcc(&["encode", path(&input), path(&packed)]).status.success());
    let bytes = std::fs::read(&packed).unwrap();
    let cut = dir.path().join("cut.pcc");
    std::fs::write(&cut, &bytes[..bytes.len() - 1]).unwrap();
    assert_eq!(pcc(&["decode", path(&cut), path(&dir.path().join("o1"))]).status.code(), Some(3));
    let mut magic = bytes.clone();
    magic[0] = b'X';
    let bad = dir.path().join("bad.pcc");
    std::fs::write(&bad, &magic).unwrap();
    let out = pcc(&["decode", path(&bad), path(&dir.path().join("o2"))]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("magic"));
    assert!(!dir.path().join("o2").exists());
}

#[test]
fn bounds_csv() {
    let out = pcc(&["bounds", "--env", "geom:C=2,q=0.5", "--n", "8,64"]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][2], "1.5");
}

#[test]
fn simulate_is_deterministic() {
    let args = ["simulate", "--env", "geom:C=2,q=0.5", "--n", "256,4096", "--trials", "100", "--seed", "7"];
    let a = pcc(&args);
    let b = pcc(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut rdr = csv::Reader::from_reader(a.stdout.as_slice());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["env", "source", "n", "trial", "code_bits", "ideal_bits", "neg_log_p", "redundancy_bits"]
    );
    assert_eq!(rdr.records().count(), 200);
}

#[test]
fn lemmas_all_ok() {
    let out = pcc(&["lemmas", "--env", "power:C=1,alpha=0.5", "--n", "1000"]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["lemma", "n", "param", "lhs", "rhs", "slack", "status"]);
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert!(rows.len() > 10);
    assert!(rows.iter().all(|r| &r[6] == "OK"));
}

#[test]
fn invalid_envelope_is_usage_error() {
    assert_eq!(pcc(&["bounds", "--env", "geom:C=0.5,q=0.5", "--n", "8"]).status.code(), Some(2));
    assert_eq!(pcc(&["simulate", "--env", "nope", "--n", "8"]).status.code(), Some(2));
}
