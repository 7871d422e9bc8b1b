//! Built-in parameterizations of known optimal configurations.

use super::spec::{ConfigSpec, Generator, ParamRef, ParamVector, Sign};
use crate::error::{Error, Result};
use crate::numerics::BigReal;
use crate::potentials::Potential;

/// Precision of [`builtin_spec`] constants and seeds.
pub const REGISTRY_DIGITS: u32 = 40;

/// Point counts with a registry entry.
pub const REGISTERED: [usize; 13] = [5, 7, 8, 9, 10, 12, 14, 17, 18, 27, 32, 38, 50];

struct Entry {
    names: &'static [&'static str],
    generators: Vec<Generator>,
    /// Seeds for log, 1/r and 1/r², `None` when the structure is not
    /// optimal for that potential.
    seeds: [Option<&'static [&'static str]>; 3],
}

struct Ctx {
    digits: u32,
}

impl Ctx {
    fn c(&self, v: f64) -> ParamRef {
        ParamRef::Const(BigReal::from_f64(v, self.digits))
    }

    fn ring(&self, k: usize, z: ParamRef, phase: f64) -> Generator {
        Generator::Ring { k, z, phase: self.c(phase) }
    }

    fn poles(&self, inner: Vec<Generator>) -> Vec<Generator> {
        let mut g = vec![Generator::Pole { z_sign: Sign::Plus }];
        g.extend(inner);
        g.push(Generator::Pole { z_sign: Sign::Minus });
        g
    }

    fn sqrt_ratio(&self, num: BigReal, den: i64) -> ParamRef {
        ParamRef::Const((num / BigReal::from_i64(den, self.digits)).sqrt().expect("positive"))
    }
}

fn var(i: usize) -> ParamRef {
    ParamRef::var(i)
}

fn neg(i: usize) -> ParamRef {
    ParamRef::neg_var(i)
}

fn entry(n: usize, cx: &Ctx) -> Option<Entry> {
    let p = cx.digits;
    let e = match n {
        5 | 7 => Entry {
            names: &[],
            generators: cx.poles(vec![cx.ring(n - 2, cx.c(0.0), 0.0)]),
            seeds: [None, Some(&[]), Some(&[])],
        },
        8 => Entry {
            names: &["a"],
            generators: vec![cx.ring(4, var(0), 0.5), cx.ring(4, neg(0), 0.0)],
            seeds: [
                Some(&["0.5646169639331753669"]),
                Some(&["0.5604367652904311982"]),
                Some(&["0.5563309621802899475"]),
            ],
        },
        9 => Entry {
            names: &["a"],
            generators: vec![cx.ring(3, var(0), 0.75), cx.ring(3, cx.c(0.0), 0.25), cx.ring(3, neg(0), 0.75)],
            seeds: [
                Some(&["0.7031106068430678248"]),
                Some(&["0.7036483958041317758"]),
                Some(&["0.7046074370271068597"]),
            ],
        },
        10 => Entry {
            names: &["a"],
            generators: cx.poles(vec![cx.ring(4, var(0), 0.0), cx.ring(4, neg(0), 0.5)]),
            seeds: [
                Some(&["0.4204838855379730022"]),
                Some(&["0.4226874240439860662"]),
                Some(&["0.4242756082881730876"]),
            ],
        },
        12 => {
            let s: &'static [&'static str] = &["0.4472135954999579393"];
            Entry {
                names: &["a"],
                generators: cx.poles(vec![cx.ring(5, var(0), 0.0), cx.ring(5, neg(0), 0.5)]),
                seeds: [Some(s), Some(s), Some(s)],
            }
        }
        14 => {
            let free = |z: ParamRef, x: ParamRef, y_sign| Generator::FreePoint { z, x, y_sign };
            let mut g = vec![Generator::Pole { z_sign: Sign::Plus }];
            g.extend([
                free(var(0), var(1), Sign::Minus),
                free(var(0), neg(1), Sign::Plus),
                free(var(0), var(1), Sign::Plus),
                free(var(0), neg(1), Sign::Minus),
                cx.ring(2, var(0), 0.0),
                cx.ring(2, neg(0), 0.5),
                free(neg(0), var(2), Sign::Minus),
                free(neg(0), neg(2), Sign::Plus),
                free(neg(0), var(2), Sign::Plus),
                free(neg(0), neg(2), Sign::Minus),
            ]);
            g.push(Generator::Pole { z_sign: Sign::Minus });
            Entry {
                names: &["a", "b", "c"],
                generators: g,
                seeds: [
                    Some(&["0.4591508204907729375", "0.4441791654396483527", "0.7693408822050128806"]),
                    Some(&["0.4553677951624630035", "0.4451517076033959054", "0.7710253746451266125"]),
                    Some(&["0.4518625916952697588", "0.4460437753815296572", "0.7725704813606493514"]),
                ],
            }
        }
        17 => Entry {
            names: &["a"],
            generators: cx.poles(vec![cx.ring(5, var(0), 0.5), cx.ring(5, cx.c(0.0), 0.0), cx.ring(5, neg(0), 0.5)]),
            seeds: [
                Some(&["0.6076810889242587549"]),
                Some(&["0.6095575990554807772"]),
                Some(&["0.6117975792003008025"]),
            ],
        },
        18 => Entry {
            names: &["a", "b"],
            generators: cx.poles(vec![
                cx.ring(4, var(0), 0.0),
                cx.ring(4, var(1), 0.5),
                cx.ring(4, neg(1), 0.0),
                cx.ring(4, neg(0), 0.5),
            ]),
            seeds: [
                Some(&["0.6754406562091057220", "0.2063761761970050338"]),
                Some(&["0.6751471684502996248", "0.2034104243431649960"]),
                Some(&["0.6743335122024262360", "0.2007314823505518450"]),
            ],
        },
        27 => Entry {
            names: &["a", "b"],
            generators: cx.poles(vec![
                cx.ring(5, var(0), 0.0),
                cx.ring(5, var(1), 0.5),
                cx.ring(5, cx.c(0.0), 0.0),
                cx.ring(5, neg(1), 0.5),
                cx.ring(5, neg(0), 0.0),
            ]),
            seeds: [
                Some(&["0.7538089984441335383", "0.3604942753234939635"]),
                Some(&["0.7538564449703482744", "0.3589242703564896574"]),
                Some(&["0.7539171374221273508", "0.3574199262261141346"]),
            ],
        },
        32 => {
            // Icosahedron with poles on the z axis plus the dual dodecahedron.
            let five = BigReal::from_i64(5, p);
            let r5 = five.sqrt().expect("positive");
            let ico = cx.sqrt_ratio(BigReal::one(p), 5);
            let hi = cx.sqrt_ratio(&five + &(&r5 * 2.0), 15);
            let lo = cx.sqrt_ratio(&five - &(&r5 * 2.0), 15);
            let negc = |r: &ParamRef| match r {
                ParamRef::Const(v) => ParamRef::Const(-v),
                other => other.clone(),
            };
            Entry {
                names: &[],
                generators: cx.poles(vec![
                    cx.ring(5, ico.clone(), 0.0),
                    cx.ring(5, negc(&ico), 0.5),
                    cx.ring(5, hi.clone(), 0.5),
                    cx.ring(5, negc(&hi), 0.0),
                    cx.ring(5, lo.clone(), 0.5),
                    cx.ring(5, negc(&lo), 0.0),
                ]),
                seeds: [Some(&[]), Some(&[]), Some(&[])],
            }
        }
        38 => Entry {
            names: &["a", "b", "c"],
            generators: cx.poles(vec![
                cx.ring(6, var(0), 0.5),
                cx.ring(6, var(1), 0.0),
                cx.ring(6, var(2), 0.5),
                cx.ring(6, neg(2), 0.0),
                cx.ring(6, neg(1), 0.5),
                cx.ring(6, neg(0), 0.0),
            ]),
            seeds: [
                Some(&["0.8039422032494780264", "0.4583733204758793321", "0.1721603867747475720"]),
                Some(&["0.8031706352420300965", "0.4581934070811996284", "0.1698720444743110028"]),
                Some(&["0.8024795013067287797", "0.4577217788720220286", "0.1675495508816995084"]),
            ],
        },
        50 => Entry {
            names: &["a", "b", "c", "d"],
            generators: cx.poles(vec![
                cx.ring(6, var(0), 0.0),
                cx.ring(6, var(1), 0.5),
                cx.ring(6, var(2), 0.0),
                cx.ring(6, var(3), 0.5),
                cx.ring(6, neg(3), 0.0),
                cx.ring(6, neg(2), 0.5),
                cx.ring(6, neg(1), 0.0),
                cx.ring(6, neg(0), 0.5),
            ]),
            seeds: [
                Some(&[
                    "0.8515838011853908757",
                    "0.5845080765467688786",
                    "0.3823580555306074125",
                    "0.1056903533827164585",
                ]),
                Some(&[
                    "0.8513832027240754402",
                    "0.5859466784603221965",
                    "0.3828907922740789633",
                    "0.1079740016327089417",
                ]),
                Some(&[
                    "0.8514411311335073360",
                    "0.5875147416660090262",
                    "0.3834970349379620340",
                    "0.1100866382336972714",
                ]),
            ],
        },
        _ => return None,
    };
    Some(e)
}

/// Registry structure and seed at [`REGISTRY_DIGITS`].
pub fn builtin_spec(n: usize, pot: Potential) -> Result<(ConfigSpec, ParamVector)> {
    builtin_spec_with_digits(n, pot, REGISTRY_DIGITS)
}

/// Registry structure with constants and seeds carried at `digits`.
pub fn builtin_spec_with_digits(n: usize, pot: Potential, digits: u32) -> Result<(ConfigSpec, ParamVector)> {
    let unregistered = || Error::Unregistered { n, potential: pot.token() };
    let slot = match pot {
        Potential::Log => 0,
        Potential::Riesz(1) => 1,
        Potential::Riesz(2) => 2,
        Potential::Riesz(_) => return Err(unregistered()),
    };
    let e = entry(n, &Ctx { digits }).ok_or_else(unregistered)?;
    let seeds = e.seeds[slot].ok_or_else(unregistered)?;
    let names: Vec<String> = e.names.iter().map(|s| s.to_string()).collect();
    let spec = ConfigSpec::new(names.clone(), e.generators)?;
    let values = seeds.iter().map(|s| BigReal::parse(s, digits)).collect::<Result<Vec<_>>>()?;
    Ok((spec, ParamVector::new(names, values, digits)?))
}
