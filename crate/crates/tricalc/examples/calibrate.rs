use tricalc::curves::*;
use tricalc::geom::rat;
use tricalc::moves::{apply_word, Targets};
use tricalc::reduce::{geometric_int, is_parallel};
use tricalc::trisection::*;
use tricalc::catalog::slide_near;

fn build(s_a3: (i8, i8), s_dc: (i8, i8)) -> Arrangement {
    let mut arr = Arrangement::new(3);
    let mut c = |n: &str, f: Family, w: Vec<Token>| {
        arr.curves.insert(n.into(), Curve { family: f, word: w });
    };
    c("alpha1", Family::Alpha, vec![Token::new(1, 1, rat(1, 8))]);
    c("alpha2", Family::Alpha, vec![Token::new(1, 4, rat(1, 8)), Token::new(1, 3, rat(1, 4))]);
    c("alpha3", Family::Alpha, vec![Token::new(s_a3.0, 5, rat(1, 2)), Token::new(s_a3.1, 2, rat(1, 4))]);
    c("beta1", Family::Beta, vec![Token::new(1, 1, rat(1, 4))]);
    c("beta2", Family::Beta, vec![Token::new(1, 3, rat(1, 2))]);
    c("beta3", Family::Beta, vec![Token::new(1, 4, rat(3, 8))]);
    c("gamma1", Family::Gamma, vec![Token::new(1, 0, rat(1, 4))]);
    c("gamma2", Family::Gamma, vec![Token::new(1, 4, rat(5, 8))]);
    c("gamma3", Family::Gamma, vec![Token::new(1, 2, rat(1, 2))]);
    c("m", Family::Aux, vec![Token::new(1, 1, rat(3, 8))]);
    c("dA", Family::Aux, vec![Token::new(1, 0, rat(1, 2))]);
    c("dC", Family::Aux, vec![Token::new(s_dc.0, 0, rat(3, 4)), Token::new(s_dc.1, 3, rat(3, 4))]);
    arr
}

fn main() {
    let signs = [(1i8, 1i8), (1, -1), (-1, 1), (-1, -1)];
    for s_a3 in signs {
        for s_dc in signs {
            let arr = build(s_a3, s_dc);
            if arr.realize().is_err() {
                continue;
            }
            let dia = TrisectionDiagram::new(
                arr.clone(),
                vec!["alpha1".into(), "alpha2".into(), "alpha3".into()],
                vec!["beta1".into(), "beta2".into(), "beta3".into()],
                vec!["gamma1".into(), "gamma2".into(), "gamma3".into()],
            );
            let ty = match validate_trisection(&dia) { Ok(t) => t, Err(_) => continue };
            let (h1, chi) = match four_manifold_homology(&dia) { Ok(x) => x, Err(_) => continue };
            if !h1.is_empty() || chi != 2 { 
                println!("a3={:?} dc={:?}: type {} h1 {:?} chi {}", s_a3, s_dc, ty, h1, chi);
                continue;
            }
            // X4: f1(m) slid over beta2 once ~ m
            let mut work = arr.clone();
            work.curves.insert("f1m".into(), Curve { family: Family::Aux, word: work.curves["m"].word.clone() });
            let tg = Targets::Named(["f1m".to_string()].into());
            let mut x4 = false;
            for word in [vec![("dA".to_string(), -1i64), ("dC".to_string(), 1)],
                         vec![("dA".to_string(), 1), ("dC".to_string(), -1)]] {
                let tw = match apply_word(&work, &word, &tg) { Ok(t) => t, Err(_) => continue };
                if geometric_int(&tw, "f1m", "beta2").unwrap_or(9) != 0 { continue; }
                if let Ok(af) = slide_near(&tw, "f1m", "beta2", 3, 1) {
                    if is_parallel(&af, "f1m", "m").unwrap_or(false) {
                        x4 = true;
                        break;
                    }
                }
            }
            println!("a3={:?} dc={:?}: type {} OK  X4={}", s_a3, s_dc, ty, x4);
        }
    }
}
