use std::cmp::Ordering;

use chainforge::version::{LocalSegment, PreKind, Version};
use proptest::prelude::*;

use super::check_cases;

/// Structured version plus one of its many valid spellings.
#[derive(Debug, Clone)]
pub struct Spelled {
    pub text: String,
    pub epoch: u64,
    pub release: Vec<u64>,
    pub pre: Option<(u8, u64)>,
    pub post: Option<u64>,
    pub dev: Option<u64>,
    pub local: Option<Vec<String>>,
}

fn spelled() -> impl Strategy<Value = Spelled> {
    (
        prop_oneof![4 => Just(0u64), 1 => 1u64..3],
        prop::collection::vec(0u64..12, 1..5),
        prop::option::weighted(0.3, (0u8..3, 0u64..4)),
        prop::option::weighted(0.2, 0u64..4),
        prop::option::weighted(0.2, 0u64..4),
        prop::option::weighted(
            0.15,
            prop::collection::vec(
                prop_oneof![(0u64..100).prop_map(|n| n.to_string()), "[a-z]{1,3}"],
                1..3,
            ),
        ),
        any::<(bool, bool, u8, u8)>(),
    )
        .prop_map(
            |(epoch, release, pre, post, dev, local, (vprefix, upper, pre_style, post_style))| {
                let mut text = String::new();
                if vprefix {
                    text.push('v');
                }
                if epoch > 0 {
                    text.push_str(&format!("{epoch}!"));
                }
                text.push_str(
                    &release
                        .iter()
                        .map(u64::to_string)
                        .collect::<Vec<_>>()
                        .join("."),
                );
                if let Some((kind, n)) = pre {
                    let labels: [&[&str]; 3] = [
                        &["a", "alpha"],
                        &["b", "beta"],
                        &["rc", "c", "pre", "preview"],
                    ];
                    let opts = labels[kind as usize];
                    let label = opts[pre_style as usize % opts.len()];
                    let sep = ["", ".", "-", "_"][pre_style as usize % 4];
                    text.push_str(&format!("{sep}{label}{n}"));
                }
                if let Some(n) = post {
                    match post_style % 3 {
                        0 => text.push_str(&format!(".post{n}")),
                        1 => text.push_str(&format!("-{n}")),
                        _ => text.push_str(&format!("_rev{n}")),
                    }
                }
                if let Some(n) = dev {
                    text.push_str(&format!(".dev{n}"));
                }
                if let Some(segs) = &local {
                    text.push('+');
                    text.push_str(&segs.join(if upper { "-" } else { "." }));
                }
                if upper {
                    text = text.to_uppercase();
                }
                Spelled {
                    text,
                    epoch,
                    release,
                    pre,
                    post,
                    dev,
                    local,
                }
            },
        )
}

/// Sort key mirroring the reference comparison rules, built from the
/// generator's structure rather than the parser's output.
#[derive(Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Bound {
    Neg,
    Val(u64, u64),
    Pos,
}

#[derive(Debug, PartialEq, Eq, PartialOrd, Ord)]
enum LocalKey {
    Text(String),
    Num(u64),
}

fn key(s: &Spelled) -> (u64, Vec<u64>, Bound, Bound, Bound, Option<Vec<LocalKey>>) {
    let mut release = s.release.clone();
    while release.len() > 1 && *release.last().unwrap() == 0 {
        release.pop();
    }
    if release == [0] {
        release.clear();
    }
    let pre = match (s.pre, s.post, s.dev) {
        (None, None, Some(_)) => Bound::Neg,
        (None, _, _) => Bound::Pos,
        (Some((k, n)), _, _) => Bound::Val(k as u64, n),
    };
    let post = s.post.map_or(Bound::Neg, |n| Bound::Val(0, n));
    let dev = s.dev.map_or(Bound::Pos, |n| Bound::Val(0, n));
    let local = s.local.as_ref().map(|segs| {
        segs.iter()
            .map(|seg| match seg.parse::<u64>() {
                Ok(n) => LocalKey::Num(n),
                Err(_) => LocalKey::Text(seg.to_lowercase()),
            })
            .collect()
    });
    (s.epoch, release, pre, post, dev, local)
}

pub const CASES: u32 = 10_000;

pub fn parse_recovers_structure(cases: u32) {
    check_cases(cases, &spelled(), |s| {
        let v = Version::parse(&s.text).unwrap();
        prop_assert_eq!(v.epoch, s.epoch);
        prop_assert_eq!(&v.release, &s.release);
        let kinds = [PreKind::Alpha, PreKind::Beta, PreKind::Rc];
        prop_assert_eq!(v.pre, s.pre.map(|(k, n)| (kinds[k as usize], n)));
        prop_assert_eq!(v.post, s.post);
        prop_assert_eq!(v.dev, s.dev);
        let local = s.local.as_ref().map(|segs| {
            segs.iter()
                .map(|seg| match seg.parse::<u64>() {
                    Ok(n) => LocalSegment::Number(n),
                    Err(_) => LocalSegment::Text(seg.to_lowercase()),
                })
                .collect::<Vec<_>>()
        });
        prop_assert_eq!(&v.local, &local);
        Ok(())
    });
}

pub fn normalize_is_fixed_point(cases: u32) {
    check_cases(cases, &spelled(), |s| {
        let v = Version::parse(&s.text).unwrap();
        let n = v.normalize();
        let again = Version::parse(&n).unwrap();
        prop_assert_eq!(&again, &v);
        prop_assert_eq!(again.normalize(), n);
        Ok(())
    });
}

pub fn order_matches_reference_key(cases: u32) {
    check_cases(cases, &(spelled(), spelled()), |(a, b)| {
        let (va, vb) = (
            Version::parse(&a.text).unwrap(),
            Version::parse(&b.text).unwrap(),
        );
        prop_assert_eq!(
            va.cmp(&vb),
            key(&a).cmp(&key(&b)),
            "{} vs {}",
            a.text,
            b.text
        );
        Ok(())
    });
}

pub fn order_laws(cases: u32) {
    check_cases(cases, &(spelled(), spelled(), spelled()), |(a, b, c)| {
        let (a, b, c) = (
            Version::parse(&a.text).unwrap(),
            Version::parse(&b.text).unwrap(),
            Version::parse(&c.text).unwrap(),
        );
        prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
        if a <= b && b <= a {
            prop_assert_eq!(&a, &b);
        }
        if a <= b && b <= c {
            prop_assert!(a <= c);
        }
        prop_assert_eq!(a == b, a.cmp(&b) == Ordering::Equal);
        Ok(())
    });
}

pub fn trailing_zeros_compare_equal() {
    let a = Version::parse("1.0").unwrap();
    let b = Version::parse("1.0.0").unwrap();
    assert_eq!(a, b);
    assert_eq!(a.raw(), "1.0");
    assert_eq!(b.raw(), "1.0.0");
}

pub fn documented_examples() {
    let v = Version::parse("1!2.0rc1.post3.dev4+ubuntu.7").unwrap();
    assert_eq!(v.epoch, 1);
    assert_eq!(v.release, vec![2, 0]);
    assert_eq!(v.pre, Some((PreKind::Rc, 1)));
    assert_eq!((v.post, v.dev), (Some(3), Some(4)));
    assert_eq!(
        v.local,
        Some(vec![
            LocalSegment::Text("ubuntu".into()),
            LocalSegment::Number(7)
        ])
    );
    assert_eq!(Version::parse("1.0-ALPHA1").unwrap().normalize(), "1.0a1");
    assert_eq!(
        Version::parse("v1.0+Foo.1").unwrap().normalize(),
        "1.0+foo.1"
    );
    let chain: Vec<Version> = ["1.0.dev1", "1.0a1", "1.0rc1", "1.0", "1.0.post1"]
        .iter()
        .map(|s| Version::parse(s).unwrap())
        .collect();
    assert!(chain.windows(2).all(|w| w[0] < w[1]));
    assert!(Version::parse("2!0.1").unwrap() > Version::parse("999.0").unwrap());
    assert!(Version::parse("not-a-version").is_err());
}
