//! Stock shifts and codes used across tests and the command line.

use crate::alphabet::Alphabet;
use crate::code::SlidingBlockCode;
use crate::point::Sidedness;
use crate::presentation::ShiftPresentation;
use crate::word::Word;

/// Binary shift forbidding adjacent ones.
pub fn golden_mean() -> ShiftPresentation {
    let a = Alphabet::digits(2);
    let forbidden = [Word::parse(&a, "11").expect("in alphabet")];
    ShiftPresentation::from_forbidden("golden", &a, &forbidden, Sidedness::TwoSided)
        .expect("nonempty")
}

/// Unconstrained shift on k symbols.
pub fn full_shift(k: usize, sided: Sidedness) -> ShiftPresentation {
    let a = Alphabet::digits(k);
    let name = format!("full{k}");
    ShiftPresentation::from_forbidden(&name, &a, &[], sided).expect("nonempty")
}

/// Ones separated by even runs of zeros: strictly sofic.
pub fn even_shift() -> ShiftPresentation {
    let a = Alphabet::digits(2);
    ShiftPresentation::from_regex("even", &a, "(1(00)*)*", Sidedness::TwoSided).expect("nonempty")
}

/// The do-nothing block code on a given alphabet.
pub fn identity_code(alphabet: &Alphabet) -> SlidingBlockCode {
    SlidingBlockCode::from_fn(
        "identity",
        alphabet.clone(),
        alphabet.clone(),
        0,
        0,
        |w| w[0],
    )
}

/// Exchanges the two symbols of the binary alphabet.
pub fn swap_code() -> SlidingBlockCode {
    let a = Alphabet::digits(2);
    SlidingBlockCode::from_fn("swap", a.clone(), a, 0, 0, |w| 1 - w[0])
}

/// Cycles 0 -> 1 -> 2 -> 0 on three symbols.
pub fn three_cycle_code() -> SlidingBlockCode {
    let a = Alphabet::digits(3);
    SlidingBlockCode::from_fn("three_cycle", a.clone(), a, 0, 0, |w| (w[0] + 1) % 3)
}

/// Swap composed with the shift: y_i = 1 - x_{i+1}.
pub fn shifted_swap_code() -> SlidingBlockCode {
    let a = Alphabet::digits(2);
    SlidingBlockCode::from_fn("shifted_swap", a.clone(), a, 0, 1, |w| 1 - w[1])
}

/// Inverse of [`shifted_swap_code`]: y_i = 1 - x_{i-1}.
pub fn shifted_swap_inverse() -> SlidingBlockCode {
    let a = Alphabet::digits(2);
    SlidingBlockCode::from_fn("shifted_swap_inv", a.clone(), a, 1, 0, |w| 1 - w[0])
}

/// Self-inverse radius-1 code on three symbols: swaps 1 and 2 exactly when
/// the right neighbor is 0, so the trigger survives the swap.
pub fn conditional_swap_code() -> SlidingBlockCode {
    let a = Alphabet::digits(3);
    SlidingBlockCode::from_fn("conditional_swap", a.clone(), a, 0, 1, |w| {
        match (w[0], w[1]) {
            (1, 0) => 2,
            (2, 0) => 1,
            (s, _) => s,
        }
    })
}

/// Overlapping 2-block recoding of the golden mean shift, with its image
/// presentation. Conjugate to the identity, but over the block alphabet.
pub fn two_block_code() -> (SlidingBlockCode, ShiftPresentation) {
    let golden = golden_mean();
    let power = golden.power_recode(2).expect("m > 0");
    let block_alphabet = power.presentation().alphabet().clone();
    let blocks: Vec<Vec<crate::alphabet::SymbolId>> = power
        .blocks()
        .iter()
        .map(|w| w.symbols().to_vec())
        .collect();
    let mut code = SlidingBlockCode::new(
        "two_block",
        golden.alphabet().clone(),
        block_alphabet,
        0,
        1,
    );
    for (id, block) in blocks.iter().enumerate() {
        let w = Word::new(golden.alphabet().clone(), block.clone());
        code.add_rule(&w, id).expect("fresh rule");
    }
    let image = code.image_presentation(&golden).expect("total on golden");
    (code, image)
}
