use tricalc::curves::*;
use tricalc::geom::rat;
use tricalc::moves::{apply_word, dehn_twist, Targets};
use tricalc::reduce::{geometric_int, is_parallel};
use tricalc::catalog::{slide_auto, parallel_copy};

fn build() -> Arrangement {
    let mut arr = Arrangement::new(3);
    let mut c = |n: &str, f: Family, w: Vec<Token>| { arr.curves.insert(n.into(), Curve { family: f, word: w }); };
    c("alpha1", Family::Alpha, vec![Token::new(1, 1, rat(1, 8))]);
    c("alpha2", Family::Alpha, vec![Token::new(1, 4, rat(1, 8)), Token::new(1, 3, rat(1, 4))]);
    c("alpha3", Family::Alpha, vec![Token::new(1, 5, rat(1, 2)), Token::new(1, 2, rat(1, 4))]);
    c("beta1", Family::Beta, vec![Token::new(1, 1, rat(1, 4))]);
    c("beta2", Family::Beta, vec![Token::new(1, 3, rat(1, 2))]);
    c("beta3", Family::Beta, vec![Token::new(1, 4, rat(3, 8))]);
    c("gamma1", Family::Gamma, vec![Token::new(1, 0, rat(1, 4))]);
    c("gamma2", Family::Gamma, vec![Token::new(1, 4, rat(5, 8))]);
    c("gamma3", Family::Gamma, vec![Token::new(1, 2, rat(1, 2))]);
    c("m", Family::Aux, vec![Token::new(1, 1, rat(3, 8))]);
    c("dA", Family::Aux, vec![Token::new(1, 0, rat(1, 2))]);
    c("dC", Family::Aux, vec![Token::new(1, 0, rat(3, 4)), Token::new(1, 3, rat(3, 4))]);
    arr
}

fn fword(i: i64) -> Vec<(String, i64)> {
    let mut w = Vec::new();
    for _ in 0..i {
        w.push(("dA".to_string(), -1));
        w.push(("dC".to_string(), 1));
    }
    w
}

fn main() {
    let i = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let mut arr = build();
    // m' as a named aux
    arr = parallel_copy(&arr, "m", "mp", Family::Aux).unwrap();
    arr = slide_auto(&arr, "mp", "alpha2", 1).unwrap();

    // target curves (frozen): t_{f_{i-1}(m)}(gamma_j), t_mp(beta_j), alpha_j
    let mut frozen: std::collections::BTreeSet<String> = Default::default();
    // fprev = f_{i-1}(m)
    arr = parallel_copy(&arr, "m", "fprev", Family::Aux).unwrap();
    arr = apply_word(&arr, &fword(i - 1), &Targets::Named(["fprev".into()].into())).unwrap();
    for j in 1..=3 {
        let g = format!("gamma{}", j);
        let t = format!("tgt_g{}", j);
        arr = parallel_copy(&arr, &g, &t, Family::Aux).unwrap();
        arr = dehn_twist(&arr, "fprev", 1, &Targets::Named([t.clone()].into())).unwrap();
        frozen.insert(t);
        let b = format!("beta{}", j);
        let tb = format!("tgt_b{}", j);
        arr = parallel_copy(&arr, &b, &tb, Family::Aux).unwrap();
        arr = dehn_twist(&arr, "mp", 1, &Targets::Named([tb.clone()].into())).unwrap();
        frozen.insert(tb);
        let a = format!("alpha{}", j);
        let ta = format!("tgt_a{}", j);
        arr = parallel_copy(&arr, &a, &ta, Family::Aux).unwrap();
        frozen.insert(ta);
    }
    frozen.insert("fprev".into());

    // build the i-form: twist the gamma family by f_i(m)
    arr = parallel_copy(&arr, "m", "fim", Family::Aux).unwrap();
    arr = apply_word(&arr, &fword(i), &Targets::Named(["fim".into()].into())).unwrap();
    let gammas = Targets::Named(["gamma1".into(), "gamma2".into(), "gamma3".into()].into());
    arr = dehn_twist(&arr, "fim", 1, &gammas).unwrap();
    println!("form built: gamma lens {:?}",
        (1..=3).map(|j| arr.curves[&format!("gamma{}", j)].word.len()).collect::<Vec<_>>());

    // --- the seesaw step ---
    // 1. global t_fim^{-1} (not touching frozen targets or fim itself)
    let mut except = frozen.clone();
    except.insert("fim".into());
    arr = dehn_twist(&arr, "fim", -1, &Targets::AllExcept(except.clone())).unwrap();
    // 2. fbar = fim slid over alpha2
    arr = parallel_copy(&arr, "fim", "fbar", Family::Aux).unwrap();
    arr = slide_auto(&arr, "fbar", "alpha2", 1).unwrap();
    // 3. global t_fbar
    except.insert("fbar".into());
    arr = dehn_twist(&arr, "fbar", 1, &Targets::AllExcept(except)).unwrap();
    // report
    for j in 1..=3 {
        for (fam, tgt) in [("alpha", "tgt_a"), ("beta", "tgt_b"), ("gamma", "tgt_g")] {
            let cur = format!("{}{}", fam, j);
            let t = format!("{}{}", tgt, j);
            let par = is_parallel(&arr, &cur, &t).unwrap();
            if !par {
                println!("  {} NOT parallel to target (i={}, ints: m {}, mp {}, fim {})",
                    cur, geometric_int(&arr, &cur, &t).unwrap(),
                    geometric_int(&arr, &cur, "m").unwrap(),
                    geometric_int(&arr, &cur, "mp").unwrap(),
                    geometric_int(&arr, &cur, "fim").unwrap());
            } else {
                println!("  {} ok", cur);
            }
        }
    }
}
