//! Snowball stemmers, one program per language, running on a shared
//! cursor machine.

mod english;
mod env;
mod french;
mod german;
mod italian;
mod portuguese;
mod spanish;

use crate::Language;
use env::Env;

pub fn stem(language: Language, word: &str) -> String {
    let mut env = Env::new(word);
    match language {
        Language::English => english::stem(&mut env),
        Language::French => french::stem(&mut env),
        Language::German => german::stem(&mut env),
        Language::Italian => italian::stem(&mut env),
        Language::Portuguese => portuguese::stem(&mut env),
        Language::Spanish => spanish::stem(&mut env),
    }
    env.into_string()
}
