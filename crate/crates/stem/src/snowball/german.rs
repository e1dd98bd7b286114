//! German Snowball stemmer.

use super::env::{among, Among, Env};

const V: &str = "aeiouyäöü";
const ET_ENDING: &str = "Udfgklmnrstzä";
const S_ENDING: &str = "bdfghklmnrt";
const ST_ENDING: &str = "bdfghklmnt";

const PRELUDE: &[Among] = &[
    among("", 5),
    among("ae", 2),
    among("oe", 3),
    among("qu", -1),
    among("ue", 4),
    among("ß", 1),
];

const POSTLUDE: &[Among] = &[
    among("", 5),
    among("U", 2),
    among("Y", 1),
    among("ä", 3),
    among("ö", 4),
    among("ü", 2),
];

const SUFFIX_1: &[Among] = &[
    among("e", 3),
    among("em", 1),
    among("en", 3),
    among("erinnen", 2),
    among("erin", 2),
    among("ln", 5),
    among("ern", 2),
    among("er", 2),
    among("s", 4),
    among("es", 3),
    among("lns", 5),
];

const ET_EXCEPTIONS: &[Among] = &[
    among("tick", -1),
    among("plan", -1),
    among("geordn", -1),
    among("intern", -1),
    among("tr", -1),
];

const SUFFIX_2: &[Among] = &[
    among("en", 1),
    among("er", 1),
    among("et", 3),
    among("st", 2),
    among("est", 1),
];

const IG_LICH: &[Among] = &[among("ig", 1), among("lich", 1)];

const SUFFIX_3: &[Among] = &[
    among("end", 1),
    among("ig", 2),
    among("ung", 1),
    among("lich", 3),
    among("isch", 2),
    among("ik", 2),
    among("heit", 3),
    among("keit", 4),
];

const APOSTROPHE: &[Among] = &[among("'", 1), among("'sch", 1), among("'s", 1)];

fn prelude(env: &mut Env) {
    let start = env.cursor;
    // u or y between vowels is treated as a consonant
    loop {
        let mut found = false;
        loop {
            let v3 = env.cursor;
            if env.in_grouping(V) {
                env.bra = env.cursor;
                let v4 = env.cursor;
                let mut done = false;
                if env.eq_c('u') {
                    env.ket = env.cursor;
                    if env.in_grouping(V) {
                        env.slice_from("U");
                        done = true;
                    }
                }
                if !done {
                    env.cursor = v4;
                    if env.eq_c('y') {
                        env.ket = env.cursor;
                        if env.in_grouping(V) {
                            env.slice_from("Y");
                            done = true;
                        }
                    }
                }
                if done {
                    env.cursor = v3;
                    found = true;
                    break;
                }
            }
            env.cursor = v3;
            if !env.next() {
                break;
            }
        }
        if !found {
            break;
        }
    }
    env.cursor = start;
    loop {
        let v5 = env.cursor;
        env.bra = env.cursor;
        let var = env.find_among(PRELUDE);
        env.ket = env.cursor;
        match var {
            1 => env.slice_from("ss"),
            2 => env.slice_from("ä"),
            3 => env.slice_from("ö"),
            4 => env.slice_from("ü"),
            5 => {
                if !env.next() {
                    env.cursor = v5;
                    break;
                }
            }
            _ => {}
        }
    }
}

fn mark_regions(env: &mut Env) {
    env.p1 = env.limit;
    env.p2 = env.limit;
    let start = env.cursor;
    if !env.hop(3) {
        return;
    }
    let x = env.cursor;
    env.cursor = start;
    if !env.go_out_grouping(V) {
        return;
    }
    env.cursor += 1;
    if !env.go_in_grouping(V) {
        return;
    }
    env.cursor += 1;
    env.p1 = env.cursor.max(x);
    if !env.go_out_grouping(V) {
        return;
    }
    env.cursor += 1;
    if !env.go_in_grouping(V) {
        return;
    }
    env.cursor += 1;
    env.p2 = env.cursor;
}

fn postlude(env: &mut Env) {
    loop {
        let v1 = env.cursor;
        env.bra = env.cursor;
        let var = env.find_among(POSTLUDE);
        env.ket = env.cursor;
        match var {
            1 => env.slice_from("y"),
            2 => env.slice_from("u"),
            3 => env.slice_from("a"),
            4 => env.slice_from("o"),
            _ => {
                if !env.next() {
                    env.cursor = v1;
                    break;
                }
            }
        }
    }
}

fn r1(env: &Env) -> bool {
    env.p1 <= env.cursor
}

fn r2(env: &Env) -> bool {
    env.p2 <= env.cursor
}

fn standard_suffix(env: &mut Env) {
    let v1 = env.from_end();
    'step1: {
        env.ket = env.cursor;
        let var = env.find_among_b(SUFFIX_1);
        if var == 0 {
            break 'step1;
        }
        env.bra = env.cursor;
        if !r1(env) {
            break 'step1;
        }
        match var {
            1 => {
                if env.eq_s_b("syst") {
                    break 'step1;
                }
                env.slice_del();
            }
            2 => env.slice_del(),
            3 => {
                env.slice_del();
                let v2 = env.from_end();
                env.ket = env.cursor;
                if env.eq_c_b('s') {
                    env.bra = env.cursor;
                    if env.eq_s_b("nis") {
                        env.slice_del();
                    } else {
                        env.restore_from_end(v2);
                    }
                } else {
                    env.restore_from_end(v2);
                }
            }
            4 => {
                if !env.in_grouping_b(S_ENDING) {
                    break 'step1;
                }
                env.slice_del();
            }
            _ => env.slice_from("l"),
        }
    }
    env.restore_from_end(v1);

    let v3 = env.from_end();
    'step2: {
        env.ket = env.cursor;
        let var = env.find_among_b(SUFFIX_2);
        if var == 0 {
            break 'step2;
        }
        env.bra = env.cursor;
        if !r1(env) {
            break 'step2;
        }
        match var {
            1 => env.slice_del(),
            2 => {
                if !env.in_grouping_b(ST_ENDING) || !env.hop_back(3) {
                    break 'step2;
                }
                env.slice_del();
            }
            _ => {
                let v4 = env.from_end();
                if !env.in_grouping_b(ET_ENDING) {
                    break 'step2;
                }
                env.restore_from_end(v4);
                let v5 = env.from_end();
                if env.find_among_b(ET_EXCEPTIONS) != 0 {
                    break 'step2;
                }
                env.restore_from_end(v5);
                env.slice_del();
            }
        }
    }
    env.restore_from_end(v3);

    let v6 = env.from_end();
    'step3: {
        env.ket = env.cursor;
        let var = env.find_among_b(SUFFIX_3);
        if var == 0 {
            break 'step3;
        }
        env.bra = env.cursor;
        if !r2(env) {
            break 'step3;
        }
        match var {
            1 => {
                env.slice_del();
                let v7 = env.from_end();
                env.ket = env.cursor;
                if env.eq_s_b("ig") {
                    env.bra = env.cursor;
                    let before_e = env.cursor;
                    if env.eq_c_b('e') || !r2(env) {
                        env.restore_from_end(v7);
                    } else {
                        env.cursor = before_e;
                        env.slice_del();
                    }
                } else {
                    env.restore_from_end(v7);
                }
            }
            2 => {
                if env.eq_c_b('e') {
                    break 'step3;
                }
                env.slice_del();
            }
            3 => {
                env.slice_del();
                let v8 = env.from_end();
                env.ket = env.cursor;
                if env.eq_s_b("er") || env.eq_s_b("en") {
                    env.bra = env.cursor;
                    if r1(env) {
                        env.slice_del();
                    } else {
                        env.restore_from_end(v8);
                    }
                } else {
                    env.restore_from_end(v8);
                }
            }
            _ => {
                env.slice_del();
                let v9 = env.from_end();
                env.ket = env.cursor;
                if env.find_among_b(IG_LICH) != 0 {
                    env.bra = env.cursor;
                    if r2(env) {
                        env.slice_del();
                    } else {
                        env.restore_from_end(v9);
                    }
                } else {
                    env.restore_from_end(v9);
                }
            }
        }
    }
    env.restore_from_end(v6);

    let v10 = env.from_end();
    'apostrophe: {
        env.ket = env.cursor;
        if env.find_among_b(APOSTROPHE) == 0 {
            break 'apostrophe;
        }
        env.bra = env.cursor;
        if !env.prev() || env.at_limit_backward() {
            break 'apostrophe;
        }
        env.slice_del();
    }
    env.restore_from_end(v10);
}

pub(crate) fn stem(env: &mut Env) {
    let v1 = env.cursor;
    prelude(env);
    env.cursor = v1;
    let v2 = env.cursor;
    mark_regions(env);
    env.cursor = v2;
    env.limit_backward = env.cursor;
    env.cursor = env.limit;
    standard_suffix(env);
    env.cursor = env.limit_backward;
    let v3 = env.cursor;
    postlude(env);
    env.cursor = v3;
}
