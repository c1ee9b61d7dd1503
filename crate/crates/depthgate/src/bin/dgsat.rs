//! Minimal DIMACS solver speaking the SAT-competition output format,
//! backed by the embedded CDCL engine. Exit code 10 means SAT, 20 UNSAT.

use std::io::BufReader;

use depthgate::dimacs::parse_dimacs;
use depthgate::solver::{solve_cdcl, Status};

fn main() {
    let path = match std::env::args().nth(1) {
        Some(path) => path,
        None => {
            eprintln!("usage: dgsat <file.cnf>");
            std::process::exit(1);
        }
    };
    let file = match std::fs::File::open(&path) {
        Ok(file) => file,
        Err(err) => {
            eprintln!("cannot open {path}: {err}");
            std::process::exit(1);
        }
    };
    let formula = match parse_dimacs(BufReader::new(file), &path) {
        Ok(formula) => formula,
        Err(err) => {
            eprintln!("parse error: {err}");
            std::process::exit(1);
        }
    };
    println!("c dgsat (varisat backend)");
    println!("c vars {} clauses {}", formula.num_vars, formula.clauses.len());
    let outcome = solve_cdcl(&formula);
    match outcome.status {
        Status::Sat => {
            println!("s SATISFIABLE");
            let assignment = outcome.assignment.expect("SAT carries a model");
            let mut line = String::from("v");
            for (idx, &value) in assignment.iter().enumerate() {
                let lit = if value { (idx + 1) as i64 } else { -((idx + 1) as i64) };
                line.push_str(&format!(" {lit}"));
                if line.len() > 70 {
                    println!("{line}");
                    line = String::from("v");
                }
            }
            line.push_str(" 0");
            println!("{line}");
            std::process::exit(10);
        }
        Status::Unsat => {
            println!("s UNSATISFIABLE");
            std::process::exit(20);
        }
        Status::Unknown(_) => {
            println!("s UNKNOWN");
        }
    }
}
