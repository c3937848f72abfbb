//! Spectroscopic labels such as `2P3/2` or `100D5/2`.

use relcoulomb::model::LevelLabel;

use crate::error::CliError;

/// Parses `<n><letter><2j>/2`, e.g. `1S1/2`. The letter is case-insensitive.
pub fn parse_level(text: &str) -> Result<LevelLabel, CliError> {
    let bad = |why: &str| CliError::Usage(format!("cannot parse level {text:?}: {why}"));
    let text = text.trim();
    let split = text.find(|c: char| !c.is_ascii_digit()).ok_or_else(|| bad("missing orbital letter"))?;
    let (digits, rest) = text.split_at(split);
    let principal: u32 = digits.parse().map_err(|_| bad("missing principal quantum number"))?;
    let mut chars = rest.chars();
    let letter = chars.next().ok_or_else(|| bad("missing orbital letter"))?;
    let l = LevelLabel::l_from_letter(letter).ok_or_else(|| bad("unknown orbital letter"))?;
    let j = chars.as_str();
    let numerator = j.strip_suffix("/2").ok_or_else(|| bad("j must be written as <2j>/2"))?;
    let two_j: u32 = numerator.parse().map_err(|_| bad("j must be written as <2j>/2"))?;
    Ok(LevelLabel::new(principal, l, two_j)?)
}
