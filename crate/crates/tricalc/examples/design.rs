use tricalc::catalog::*;
use tricalc::moves::{apply_word, Targets};
use tricalc::reduce::{geometric_int, is_parallel, algebraic_int};
use tricalc::trisection::{validate_trisection, four_manifold_homology, TrisectionDiagram, reduce_by_destabilization};

fn main() {
    // --- torus knot dpd ---
    println!("== torus knot dpd");
    for p in 2..=6 {
        match torus_knot_dpd(p) {
            Ok(arr) => {
                let i = geometric_int(&arr, "alpha", "beta").unwrap();
                let a = algebraic_int(&arr, "alpha", "beta").unwrap();
                println!("p={} i(alpha,beta)={} alg={} beta-len={}", p, i, a, arr.curves["beta"].word.len());
            }
            Err(e) => println!("p={} ERR {}", p, e),
        }
    }

    // --- seesaw base ---
    println!("== seesaw base");
    let f = match seesaw_base() {
        Ok(f) => f,
        Err(e) => { println!("seesaw_base ERR: {}", e); return; }
    };
    let dia = TrisectionDiagram::new(f.arr.clone(), f.alpha.clone(), f.beta.clone(), f.gamma.clone());
    // print intersection matrices
    for (na, nb, fa, fb) in [("alpha","beta",&f.alpha,&f.beta), ("beta","gamma",&f.beta,&f.gamma), ("gamma","alpha",&f.gamma,&f.alpha)] {
        let m = tricalc::trisection::intersection_matrix(&f.arr, fa, fb).unwrap();
        println!("J({},{}) = {:?} snf {:?}", na, nb, m, tricalc::trisection::smith_normal_form(&m));
    }
    match validate_trisection(&dia) {
        Ok(ty) => println!("type {}", ty),
        Err(e) => println!("INVALID: {}", e),
    }
    match four_manifold_homology(&dia) {
        Ok((h1, chi)) => println!("H1 {:?} chi {}", h1, chi),
        Err(e) => println!("homology ERR: {}", e),
    }
    let arr = &f.arr;
    for (x, y) in [("m","dA"), ("m","dC"), ("m","alpha2"), ("m","beta2"), ("m","gamma2"), ("m","gamma1"), ("m","beta1"), ("m","alpha1"), ("dA","dC"), ("dA","beta2"), ("dC","beta2")] {
        print!("i({},{})={}  ", x, y, geometric_int(arr, x, y).unwrap());
    }
    println!();

    // (X4): f1(m) slid over beta2 once should be parallel to m
    let mut work = arr.clone();
    work.curves.insert("f1m".into(), tricalc::curves::Curve {
        family: tricalc::curves::Family::Aux,
        word: work.curves["m"].word.clone(),
    });
    let tg = Targets::Named(["f1m".to_string()].into());
    let w = vec![("dA".to_string(), -1i64), ("dC".to_string(), 1)];
    let work = apply_word(&work, &w, &tg).unwrap();
    println!("f1m word len {}", work.curves["f1m"].word.len());
    println!("i(f1m, beta2) = {}", geometric_int(&work, "f1m", "beta2").unwrap());
    match slide_near(&work, "f1m", "beta2", 3, 1) {
        Ok(after) => {
            println!("after slide: i(f1m,m)={} parallel={}",
                geometric_int(&after, "f1m", "m").unwrap(),
                is_parallel(&after, "f1m", "m").unwrap());
        }
        Err(e) => println!("slide ERR {}", e),
    }

    // also try the reversed word direction in case orientation conventions flip
    let mut work2 = arr.clone();
    work2.curves.insert("g1m".into(), tricalc::curves::Curve {
        family: tricalc::curves::Family::Aux,
        word: work2.curves["m"].word.clone(),
    });
    let tg2 = Targets::Named(["g1m".to_string()].into());
    let w2 = vec![("dA".to_string(), 1i64), ("dC".to_string(), -1)];
    let work2 = apply_word(&work2, &w2, &tg2).unwrap();
    match slide_near(&work2, "g1m", "beta2", 3, 1) {
        Ok(after) => {
            println!("reversed word after slide: parallel={}",
                is_parallel(&after, "g1m", "m").unwrap());
        }
        Err(e) => println!("rev slide ERR {}", e),
    }

    // destab chain from the base (after cleanup slide beta2 over beta3 rev)
    println!("== destab chain");
    let (fin, log, g) = reduce_by_destabilization(&dia).unwrap();
    println!("plain greedy: genus {} after {} steps", g, log.len());
    let _ = fin;
}
