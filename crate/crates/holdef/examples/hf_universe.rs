//! Hereditarily finite sets: canonical form, pairs, function spaces.

use holdef::hfset::{HFSet, SetError};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Sets print in canonical order with duplicates collapsed, so
    // structural equality is extensional equality.
    let zero = HFSet::empty();
    let one = HFSet::singleton(zero.clone());
    let noisy = HFSet::from_elems(vec![one.clone(), zero.clone(), one.clone()]);
    println!("{{1,0,1}} canonicalizes to {noisy}");
    assert_eq!(noisy, HFSet::from_elems(vec![zero.clone(), one.clone()]));

    // Truth values are von Neumann: false is {} and true is {{}}.
    println!("false = {}, true = {}, bool = {}", HFSet::fls(), HFSet::tru(), HFSet::boolset());

    // Kuratowski pairs encode and decode.
    let pair = HFSet::kpair(zero.clone(), one.clone());
    let (a, b) = pair.dest_kpair().unwrap();
    println!("<0,1> = {pair}, projections {a} and {b}");

    // Functions are graphs; spaces enumerate all of them under a cap.
    let bools = HFSet::boolset();
    let space = HFSet::funspace(&bools, &bools, 64)?;
    println!("bool -> bool has {} element(s)", space.card());

    let neg = HFSet::graph::<SetError>(&bools, |x| Ok(HFSet::boolean(x.is_empty())))?;
    println!("negation = {neg}, lives in the space: {}", space.mem(&neg));
    println!("negation(true) = {}", neg.apply(&HFSet::tru())?);

    // Exceeding the cap is an error, not an approximation: the second
    // exponential already needs 2^4 graphs over a 4 element domain.
    let twice = HFSet::funspace(&space, &bools, 64)?;
    println!("(bool -> bool) -> bool has {} element(s)", twice.card());
    match HFSet::funspace(&twice, &bools, 64) {
        Err(e) => println!("capped: {e}"),
        Ok(s) => println!("unexpectedly built {} element(s)", s.card()),
    }
    Ok(())
}
