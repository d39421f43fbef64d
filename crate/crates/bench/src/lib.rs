//! Shared inputs for the driver benchmarks.

use dualtape::{build_input, Carrier, FunctionId, GreetingPayload};

/// The padded greeting input the CLI would build for `fid` at size `n`.
pub fn padded_input<C: Carrier>(fid: FunctionId, n: usize) -> Vec<C> {
    build_input(n, &GreetingPayload::default_for(fid), fid).expect("benchmark sizes are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inputs_have_ten_nonzeros() {
        let x: Vec<f64> = padded_input(FunctionId::Pairs, 1000);
        assert_eq!(x.iter().filter(|v| **v != 0.0).count(), 10);
    }
}
