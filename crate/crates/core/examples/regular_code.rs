//! Writes a regular LDPC parity-check matrix without 4-cycles as alist.
//!
//! ```text
//! cargo run --release -p ldpc-osd --example regular_code -- 504 3 6 2008 > codes/regular_504_252.alist
//! ```

use ldpc_osd::codes::{has_4_cycle, regular_without_4_cycles};
use ldpc_osd::{eliminate, write_alist, Permutation};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let parse = |i: usize, default: u64| args.get(i).map_or(default, |s| s.parse().expect("integer argument"));
    let n = parse(0, 504) as usize;
    let wc = parse(1, 3) as usize;
    let wr = parse(2, 6) as usize;
    let seed = parse(3, 2008);

    let h = regular_without_4_cycles(n, wc, wr, seed, 100_000).expect("construction did not converge");
    assert!(!has_4_cycle(&h));
    let rank = eliminate(&h, &Permutation::identity(n)).rank();
    eprintln!("N={} M={} rank={rank}", h.cols(), h.rows());
    print!("{}", write_alist(&h));
}
