use vmk2::model::{check_solution, load_instance, load_solution, save_instance, save_solution, InstanceFormat};
use vmk2::solvers;
use vmk2::{Configuration, Error, Vmk2Instance, Vmk2Solution};

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/four_items.json");
const FIXTURE_HASH: &str = "e2ac2f98e312d02cd718780a7d19fa74202706f8e119135c392ce9775b987037";

fn fixture() -> Vmk2Instance {
    load_instance(FIXTURE, InstanceFormat::Json, None).unwrap()
}

#[test]
fn fixture_hash_is_frozen() {
    let inst = fixture();
    assert_eq!(inst.canonical_hash(), FIXTURE_HASH);
    let ids: Vec<&str> = inst.items().iter().map(|i| i.id.as_str()).collect();
    assert_eq!(ids, ["a", "b", "c", "d"]);
}

#[test]
fn json_and_csv_round_trip() {
    let inst = fixture();
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("i.json");
    save_instance(&json, &inst).unwrap();
    assert_eq!(load_instance(&json, InstanceFormat::Json, None).unwrap(), inst);

    let csv = dir.path().join("i.csv");
    let mut text = String::from("id,w1,w2,p\n");
    for it in inst.items() {
        text += &format!("{},{},{},{}\n", it.id, it.w1, it.w2, it.profit);
    }
    std::fs::write(&csv, text).unwrap();
    assert_eq!(load_instance(&csv, InstanceFormat::Csv, Some(2)).unwrap(), inst);
    assert!(load_instance(&csv, InstanceFormat::Csv, None).is_err());
}

#[test]
fn fixture_optimum_by_hand() {
    // {a, b} and {c, d} both fit, so every item is packed
    let inst = fixture();
    let r = solvers::solve_exact(&inst, 1_000_000).unwrap();
    assert!(r.complete);
    assert!((r.profit - 7.5).abs() < 1e-12);
    let single = inst.with_bins(1).unwrap();
    assert!((solvers::solve_exact(&single, 1_000_000).unwrap().profit - 4.5).abs() < 1e-12);
}

#[test]
fn solution_files_round_trip_and_validate_ids() {
    let inst = fixture();
    let sol = Vmk2Solution::new(vec![Configuration::new([0, 1]), Configuration::new([2, 3])]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    save_solution(&path, &inst, &sol).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("\"bins\""));
    let back = load_solution(&path, &inst).unwrap();
    assert_eq!(back, sol);
    assert!(check_solution(&inst, &back).unwrap().is_feasible());

    std::fs::write(&path, r#"{"bins": [["a", "zz"]]}"#).unwrap();
    assert!(matches!(load_solution(&path, &inst), Err(Error::UnknownItem(id)) if id == "zz"));
}

#[test]
fn wrong_bin_count_is_reported() {
    let inst = fixture();
    let sol = Vmk2Solution::new(vec![Configuration::new([0]); 3]);
    let report = check_solution(&inst, &sol).unwrap();
    assert!(!report.is_feasible());
}
