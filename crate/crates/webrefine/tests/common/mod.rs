//! Shared test helpers: the mini crawl fixture and its generator.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use webrefine::registry::canonical_url;
use webrefine::warc::WarcWriter;
use webrefine_core::RejectReason;

pub const RIVER_TOWNS: &str = "River towns grew up where boats could stop to trade. In the early years, most goods moved by water because roads were poor and often closed by mud in the spring. A farmer who lived near a landing could send grain to a city market in a few days, while a farmer inland might wait for weeks until the roads dried out.
The landing itself was usually a simple place. There was a wooden dock, a warehouse for storing sacks of flour and barrels of salted meat, and a store that sold tools, cloth and coffee to the families who lived nearby. As traffic increased, a hotel and a blacksmith often followed, and the town began to take shape around the water.
Life in these towns followed the seasons of the river. High water in April brought the busiest weeks of the year, when steamboats arrived almost every day and the streets were full of people buying and selling. Low water in late summer could stop traffic completely, and merchants learned to keep enough stock on hand to last until the autumn rains.
Many river towns declined when the railroads arrived. Trains could run in every season and reach places that no boat could, so trade slowly moved away from the landings. Some towns found new work in manufacturing or tourism, while others shrank to a handful of houses along a quiet bank.
Today, visitors can still find traces of that earlier life. Old warehouses have become shops and restaurants, and local museums keep maps, photographs and letters that describe how people lived when the river was the main road to the rest of the world.";

pub const SHARED_PASSAGE: &str = "Volunteers met every Saturday morning to carry compost, build raised beds from old boards and share what they had learned during the week. Over time they discovered which plants did well in the shade of the tall buildings, and which ones needed the open corner near the street where the sun stayed longest in the afternoon.";

/// A clean English essay of 503 words that passes every gate.
pub const LIGHTHOUSES: &str = "Lighthouses were once the most important public buildings on many coasts. Before radio and satellite navigation, a sailor approaching land at night had only the stars, a compass and whatever lights could be seen from the deck. A single lamp on a high rock could mean the difference between a safe harbor and a broken hull.
The earliest lights were simple fires burning on hills or towers. Keepers fed them with wood or coal through the night, and the smoke often hid the flame just when ships needed it most. Later towers used candles and oil lamps placed behind polished metal reflectors, which gathered the light and sent it farther out to sea.
A major change came with the glass lens developed in France in the early part of the nineteenth century. Instead of one heavy curved piece, the lens was built from many rings of glass, each shaped to bend the light toward the horizon. Such a lens could be seen from more than twenty miles away, and it used far less oil than the old reflectors.
Life for the keeper was demanding and often lonely. The lamp had to be lit at sunset and watched until dawn, the wick trimmed, the glass cleaned of soot and salt, and the clockwork that turned the lens wound by hand every few hours. In bad weather the keeper might not sleep at all, and on remote islands supplies arrived only when the sea allowed a boat to land.
Many keepers lived with their families at the station. Children learned to row, to read the weather and to help with the daily work, and some of them later took over the post from their parents. Letters and diaries from these families describe long winters, sudden storms and the quiet pride of keeping a light that nobody ever thanked them for.
Each lighthouse was given its own pattern so that sailors could tell one from another. One might flash twice every ten seconds, another might show a steady red light, and a third might be dark for a moment between long white beams. Printed lists of these patterns were carried on every ship, together with charts that marked the position of each tower.
During the twentieth century electric lamps and automatic timers replaced most of the keepers. The last stations were left without staff, and the houses beside the towers were sold, rented or simply closed. Radio beacons and later satellite systems made the lights less important, although many are still maintained as a backup for small boats.
Today a number of old lighthouses have become museums, guest houses or places where visitors can climb the stairs and look out over the water. Local groups raise money to repair the towers, collect photographs and record the memories of people who grew up there. On clear evenings, people still gather on the cliffs to watch the beam turn. For many coastal towns the lighthouse remains a symbol of the long relationship between the community and the sea.";

pub fn garden_text() -> String {
    format!(
        "The community garden on the east side of the city started with a single empty lot and a group of neighbors who wanted fresh vegetables. The first season was difficult, since the soil was full of stones and broken glass, and nobody had much experience with planning beds or choosing seeds.
{SHARED_PASSAGE}
By the third year the garden had a waiting list. The group divided the lot into small plots, wrote a few simple rules about water and tools, and set aside one bed for the school across the road. Children planted beans and sunflowers, measured them every week and kept notes in a shared notebook.
The garden also changed the street around it. Neighbors who had lived next to each other for years without speaking now stopped to talk about tomatoes and rain. Older residents taught younger ones how to save seeds, and a small market appeared at the gate on summer evenings.
The city eventually bought the lot and promised to keep it open as a garden. The founders still come on Saturdays, although most of the work is now done by people who were not there at the beginning."
    )
}

const BAKERY: &str = "The bakery on Mill Street opens at six in the morning, and by seven there is usually a line of customers waiting for bread that is still warm from the oven.
The owner learned to bake from her grandmother, who kept a notebook of recipes that she had collected over many years of cooking for a large family.
Most of the recipes are simple, but each one depends on good flour, patience and an oven that holds an even heat for a long time. On weekends the shop also sells small cakes and pies, and these are often gone before noon.";

const FRENCH: &str = "La ville se trouve au bord de la rivière, et les habitants prennent souvent le bateau pour aller au marché. Le samedi matin, les familles achètent des légumes, du pain et du fromage, puis elles se promènent le long du quai. Pendant l'été, les touristes viennent nombreux pour visiter le vieux pont et les maisons colorées du centre historique. Les restaurants installent des tables dehors et la soirée se termine souvent par un concert sur la place.";

const FILLER: &str = "This page describes the opening hours of a small museum, the exhibitions planned for the coming months and the way visitors can reach the building by bus or by train from the centre of the city.";

/// A page with navigation, the text as one paragraph per line, and a footer.
pub fn page(title: &str, text: &str) -> String {
    let paragraphs: String = text.lines().map(|l| format!("<p>{l}</p>\n")).collect();
    format!(
        "<!DOCTYPE html>\n<html><head><title>{title}</title><script>var tracking = 1;</script></head>\n<body>\n\
         <nav><a href=\"/\">Home</a> <a href=\"/news\">News</a> <a href=\"/about\">About</a></nav>\n\
         <article><h1>{title}</h1>\n{paragraphs}</article>\n\
         <footer><a href=\"/contact\">Contact</a> Copyright 2023</footer>\n</body></html>\n"
    )
}

/// One engineered page of the mini crawl.
pub struct MiniPage {
    pub url: &'static str,
    pub html: String,
    /// `None` for the clean survivors.
    pub expected: Option<RejectReason>,
}

pub const REVISITED_URL: &str = "https://www.example.net/already-seen";

pub fn mini_pages() -> Vec<MiniPage> {
    let p = |url, html: String, expected| MiniPage { url, html, expected };
    let repeated = "The market opens early on Saturday and closes at noon.\n".repeat(8);
    let budget = format!("{BAKERY}\n12 likes\n4 comments\nSHARE THIS STORY WITH FRIENDS\nRead more");
    vec![
        p("https://www.example.org/articles/river-towns", page("How river towns grew", RIVER_TOWNS), None),
        p("http://casino-royal.example/blog/post", page("Museum hours", FILLER), Some(RejectReason::UrlBlocklisted)),
        p("http://www.foo.porn-bar.com/page", page("Museum hours", FILLER), Some(RejectReason::UrlWordScore)),
        p("https://en.wikipedia.org/wiki/River", page("River", FILLER), Some(RejectReason::UrlHqExcluded)),
        p(REVISITED_URL, page("Museum hours", FILLER), Some(RejectReason::UrlRevisit)),
        p(
            "http://www.example.com/empty",
            "<html><head><title>Empty</title><script>var a = 1;</script></head><body><nav><a href=\"/\">Home</a></nav></body></html>".into(),
            Some(RejectReason::ExtractionEmpty),
        ),
        p("http://www.example.fr/article", page("La ville", FRENCH), Some(RejectReason::LanguageMismatch)),
        p(
            "http://www.example.com/codes",
            page("Codes", "zxq vvk qqz xkcd jjw fgh jkl qwx zvb pmn 1234 5678"),
            Some(RejectReason::LanguageScore),
        ),
        p("http://www.example.com/market", page("Market", &repeated), Some(RejectReason::Repetition)),
        p(
            "http://www.example.com/library",
            page("Library", "The library is closed on Sunday and opens again on Monday morning."),
            Some(RejectReason::Quality),
        ),
        p("http://www.example.com/bakery", page("The bakery on Mill Street", &budget), Some(RejectReason::LineCorrectionBudget)),
        p(
            "https://www.example.org/articles/river-towns?ref=feed",
            page("How river towns grew", &RIVER_TOWNS.replace("roads were poor", "roads were bad")),
            Some(RejectReason::FuzzyDuplicate),
        ),
        p(
            "https://www.example.org/notes/saturday",
            page("Saturday notes", &format!("Posted today.\n{SHARED_PASSAGE}")),
            Some(RejectReason::ExactDupResidue),
        ),
        p("https://www.example.org/articles/community-garden", page("A garden on the east side", &garden_text()), None),
    ]
}

/// The archive: a warcinfo record, then the pages, with a request record,
/// a 404 and a PDF mixed in as non-candidates.
pub fn mini_warc() -> Vec<u8> {
    let mut w = WarcWriter::new(Vec::new(), false);
    w.write_warcinfo("software: webrefine fixture generator\r\nformat: WARC File Format 1.1\r\n").unwrap();
    for (i, pg) in mini_pages().iter().enumerate() {
        if i == 0 {
            w.write_request(pg.url).unwrap();
        }
        w.write_response(pg.url, 200, "text/html; charset=utf-8", pg.html.as_bytes()).unwrap();
        if i == 6 {
            w.write_response("http://www.example.com/missing", 404, "text/html", b"<p>Not found</p>").unwrap();
            w.write_response("http://www.example.com/report.pdf", 200, "application/pdf", b"%PDF-1.4 not html").unwrap();
        }
    }
    w.into_inner()
}

pub const MINI_CONFIG: &str = r#"# Mini crawl: twelve engineered rejections and two clean pages.
seed = 0

[io]
inputs = ["CC-MINI/*.warc"]
output = "out/part-00000.jsonl"
report = "out/part-00000.report.json"
registry = "registry.txt"

[url_filter]
blocklist_dir = "blocklist"
"#;

/// Every file of the fixture directory, relative path first.
pub fn mini_files() -> Vec<(&'static str, Vec<u8>)> {
    vec![
        ("CC-MINI/mini.warc", mini_warc()),
        ("config.toml", MINI_CONFIG.as_bytes().to_vec()),
        ("blocklist/gambling/domains", b"# test entries\ncasino-royal.example\n".to_vec()),
        ("blocklist/adult/domains", b"adult-site.example\n".to_vec()),
        ("registry.txt", format!("{}\n", canonical_url(REVISITED_URL).unwrap()).into_bytes()),
    ]
}

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/mini")
}

/// Copies the committed fixture into `dest`.
pub fn stage_mini(dest: &Path) {
    for (rel, _) in mini_files() {
        let to = dest.join(rel);
        fs::create_dir_all(to.parent().unwrap()).unwrap();
        fs::copy(fixture_dir().join(rel), &to).unwrap();
    }
}
