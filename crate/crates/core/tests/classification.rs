use affcert::classification::{classification_lookup, Family, Outcome, Verdict};
use affcert::Error;

const GOLDEN: &str = include_str!("../data/classification.golden");

fn render(dim: usize, group: &str) -> String {
    let l = classification_lookup(dim, group).unwrap();
    format!("{} {}: {}\n", l.dim, l.group, l.verdict)
}

#[test]
fn lookups_reproduce_the_golden_file() {
    let mut out = String::new();
    for line in GOLDEN.lines() {
        let (key, _) = line.split_once(": ").expect("golden line has a verdict");
        let (dim, group) = key.split_once(' ').expect("golden line has a dimension");
        out.push_str(&render(dim.parse().unwrap(), group));
    }
    assert_eq!(out, GOLDEN);
}

#[test]
fn table_examples() {
    let l = classification_lookup(5, "SO(3,2)").unwrap();
    assert_eq!(
        l.verdict,
        Verdict::PossibleLinearPart {
            family: Family::Unit,
            item: 1,
            v1_dim: 5,
            outcome: Outcome::NotProper
        }
    );
    let l = classification_lookup(6, "SO(2,1)×SL3(R)").unwrap();
    assert_eq!(
        l.verdict,
        Verdict::PossibleLinearPart {
            family: Family::Unit,
            item: 3,
            v1_dim: 6,
            outcome: Outcome::NotCrystallographic
        }
    );
    let l = classification_lookup(4, "SL3(R)").unwrap();
    assert!(matches!(
        l.verdict,
        Verdict::PossibleLinearPart {
            family: Family::NoUnit,
            item: 1,
            v1_dim: 3,
            ..
        }
    ));
}

#[test]
fn spellings_agree() {
    let a = classification_lookup(6, "SL3(R) x SO(2,1)").unwrap();
    let b = classification_lookup(6, "so(2,1)*sl3").unwrap();
    assert_eq!(a.group, b.group);
    assert_eq!(a.verdict, b.verdict);
}

#[test]
fn unknown_descriptors_and_dimensions_are_errors() {
    assert!(matches!(
        classification_lookup(5, "E8"),
        Err(Error::UnknownDescriptor(_))
    ));
    assert!(matches!(
        classification_lookup(5, "SO(3,2) × "),
        Err(Error::UnknownDescriptor(_))
    ));
    assert!(classification_lookup(7, "SL3(R)").is_err());
}
