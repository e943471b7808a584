//! Seeded generator for desk-scale knowledge bases.

use std::collections::BTreeSet;

use chrono::{Datelike, Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geo::{self, Coords};
use crate::money::Money;

const CITY_NAMES: [&str; 24] = [
    "Beijing", "Shanghai", "Guangzhou", "Chengdu", "Xi'an", "Xiamen", "Hangzhou", "Wuhan", "Nanjing", "Chongqing",
    "Suzhou", "Qingdao", "Kunming", "Guilin", "Sanya", "Harbin", "Tianjin", "Changsha", "Shenzhen", "Dali", "Lijiang",
    "Zhengzhou", "Huangshan", "Lhasa",
];

const ADJECTIVES: [&str; 24] = [
    "Jade", "Golden", "Azure", "Crimson", "Misty", "Ancient", "Silver", "Lotus", "Pine", "Dragon", "Phoenix", "Willow",
    "Peony", "Bamboo", "Cloud", "Moon", "Autumn", "Spring", "Crane", "Tiger", "Lantern", "Cedar", "Orchid", "Plum",
];
const SIGHTS: [&str; 16] = [
    "Garden", "Temple", "Museum", "Pagoda", "Lake", "Forest Park", "Old Street", "Zoo", "Gallery", "Palace",
    "Bridge", "Hill", "Aquarium", "Science Hall", "Water Town", "Theatre",
];
const EATERIES: [&str; 10] =
    ["Kitchen", "Noodle House", "Hotpot", "Dumpling Hall", "Bistro", "Tea House", "Grill", "Canteen", "Dining Room", "Steakhouse"];
const CUISINES: [&str; 8] = ["hotpot", "hunan", "cantonese", "sichuan", "noodles", "western", "vegetarian", "seafood"];
const HOTEL_WORDS: [&str; 8] = ["Inn", "Hotel", "Lodge", "Suites", "Residence", "Plaza Hotel", "Court", "House"];
const REVIEW_OPENERS: [&str; 6] = [
    "Worth the trip,",
    "Crowded at weekends but",
    "Easy to reach by metro and",
    "We came with the kids;",
    "Second visit and",
    "Arrived early,",
];
const REVIEW_BODIES: [&str; 6] = [
    "the staff were friendly and helpful.",
    "the scenery was better than expected.",
    "good value for the price.",
    "plan at least a couple of hours here.",
    "clean facilities and clear signs.",
    "the queue moved quickly.",
];
const WINDS: [&str; 4] = ["North", "South", "East", "West"];

/// Generator parameters. [`synth_kb`] uses the defaults for everything but
/// the seed and sizes.
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_cities: usize,
    pub attractions_per_city: usize,
    pub restaurants_per_attraction: usize,
    pub hotels_per_attraction: usize,
    pub weather_start: NaiveDate,
    pub weather_days: u32,
}

impl SynthConfig {
    pub fn new(seed: u64, n_cities: usize, attractions_per_city: usize) -> Self {
        SynthConfig {
            seed,
            n_cities,
            attractions_per_city,
            restaurants_per_attraction: 4,
            hotels_per_attraction: 2,
            weather_start: NaiveDate::from_ymd_opt(2024, 1, 1).expect("valid date"),
            weather_days: 366,
        }
    }
}

pub fn synth_kb(seed: u64, n_cities: usize, attractions_per_city: usize) -> Result<KnowledgeBase, KbError> {
    synth_kb_with(&SynthConfig::new(seed, n_cities, attractions_per_city))
}

pub fn synth_kb_with(cfg: &SynthConfig) -> Result<KnowledgeBase, KbError> {
    if cfg.n_cities < 2 {
        return Err(KbError::InvalidArgument(format!("n_cities must be at least 2, got {}", cfg.n_cities)));
    }
    if cfg.n_cities > 99 {
        return Err(KbError::InvalidArgument(format!("n_cities must be at most 99, got {}", cfg.n_cities)));
    }
    if cfg.attractions_per_city < 4 {
        return Err(KbError::InvalidArgument(format!(
            "attractions_per_city must be at least 4, got {}",
            cfg.attractions_per_city
        )));
    }
    if cfg.restaurants_per_attraction < 3 || cfg.hotels_per_attraction < 2 {
        return Err(KbError::InvalidArgument("need at least 3 restaurants and 2 hotels per attraction".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut parts = KbParts::default();
    let cities = gen_cities(&mut rng, cfg.n_cities);

    for city in &cities {
        let pois = gen_city_pois(&mut rng, cfg, city);
        parts.pois.extend(pois);
    }
    parts.links = gen_links(&mut rng, &cities);
    parts.weather = gen_weather(&mut rng, cfg, &cities);
    parts.cities = cities.into_iter().map(Sourced::detached).collect();

    let (kb, report) = KnowledgeBase::build(parts);
    debug_assert!(report.is_clean(), "synthetic records rejected: {}", report.render());
    Ok(kb)
}

fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

/// Cities inside a regional box, at least 80 km apart.
fn gen_cities(rng: &mut ChaCha8Rng, n: usize) -> Vec<City> {
    let mut cities: Vec<City> = Vec::with_capacity(n);
    for i in 0..n {
        let name = CITY_NAMES.get(i).map_or_else(|| format!("City {}", i + 1), |n| n.to_string());
        let mut coords;
        let mut attempts = 0;
        loop {
            coords = Coords::new(round6(rng.gen_range(113.0..119.0)), round6(rng.gen_range(27.0..32.0)));
            attempts += 1;
            if attempts > 200 || cities.iter().all(|c| geo::haversine_km(c.coords, coords) >= 80.0) {
                break;
            }
        }
        cities.push(City { id: CityId(format!("c{:02}", i + 1)), name, coords });
    }
    cities
}

fn offset(rng: &mut ChaCha8Rng, around: Coords, min_km: f64, max_km: f64) -> Coords {
    let dist = rng.gen_range(min_km..max_km);
    // Direction as a unit vector without trigonometry: rejection-sample the disc.
    let (dx, dy) = loop {
        let (x, y): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let norm = (x * x + y * y).sqrt();
        if norm > 0.05 && norm <= 1.0 {
            break (x / norm, y / norm);
        }
    };
    let dlat = dy * dist / 111.195;
    let dlon = dx * dist / (111.195 * around.lat.to_radians().cos());
    Coords::new(round6(around.lon + dlon), round6(around.lat + dlat))
}

fn reviews(rng: &mut ChaCha8Rng) -> Vec<String> {
    let n = rng.gen_range(2..=4);
    (0..n)
        .map(|_| format!("{} {}", REVIEW_OPENERS.choose(rng).unwrap(), REVIEW_BODIES.choose(rng).unwrap()))
        .collect()
}

fn unique_name(used: &mut BTreeSet<String>, base: String) -> String {
    let mut name = base.clone();
    let mut n = 2;
    while !used.insert(name.clone()) {
        name = format!("{base} {n}");
        n += 1;
    }
    name
}

fn gen_city_pois(rng: &mut ChaCha8Rng, cfg: &SynthConfig, city: &City) -> Vec<(Domain, Sourced<Poi>)> {
    let mut used_names = BTreeSet::new();
    let mut attractions = Vec::new();
    let mut restaurants = Vec::new();
    let mut hotels = Vec::new();

    for a in 0..cfg.attractions_per_city {
        let coords = offset(rng, city.coords, 0.5, 12.0);
        let name = unique_name(
            &mut used_names,
            format!("{} {} {}", city.name, ADJECTIVES.choose(rng).unwrap(), SIGHTS.choose(rng).unwrap()),
        );
        let adult = Money::from_yuan(rng.gen_range(0..=40) * 5);
        let mut tickets = vec![Ticket { label: "Adult Ticket".into(), price: adult }];
        if rng.gen_bool(0.5) {
            tickets.push(Ticket { label: "Student Ticket".into(), price: adult.scaled(6, 10) });
        }
        if rng.gen_bool(0.3) {
            tickets.push(Ticket { label: "Two-Person Ticket".into(), price: adult.times(2).scaled(9, 10) });
        }
        let open = 450 + 15 * rng.gen_range(0..=6);
        let close = 1020 + 30 * rng.gen_range(0..=8);
        let id = PoiId(format!("{}-a{:02}", city.id, a + 1));
        attractions.push(Poi {
            id: id.clone(),
            city_id: city.id.clone(),
            name,
            coords,
            open_window: OpenWindow { open, close },
            rating: round1(rng.gen_range(3.0..=5.0)),
            avg_cost: adult + Money::from_yuan(rng.gen_range(10..=60)),
            indoor: rng.gen_bool(0.5),
            reviews: reviews(rng),
            image_refs: vec![format!("img://{id}/1"), format!("img://{id}/2")],
            phone: Some(format!("0{}-{:08}", rng.gen_range(10..=99), rng.gen_range(0..100_000_000u32))),
            detail: PoiDetail::Attraction(AttractionDetail {
                tickets,
                visit_minutes: 15 * rng.gen_range(4..=10),
                nearby_restaurants: Vec::new(),
                nearby_hotels: Vec::new(),
                must_visit_rank: None,
                categories: vec!["sightseeing".into()],
            }),
        });

        for r in 0..cfg.restaurants_per_attraction + 1 {
            let snack = r == cfg.restaurants_per_attraction;
            let rid = PoiId(format!("{}-r{:03}", city.id, restaurants.len() + 1));
            let (name, cuisine, cost) = if snack {
                (
                    format!("{} Snack Bar", ADJECTIVES.choose(rng).unwrap()),
                    vec!["snack".to_string()],
                    Money::from_yuan(rng.gen_range(10..=40)),
                )
            } else {
                let c = *CUISINES.choose(rng).unwrap();
                (
                    format!("{} {}", ADJECTIVES.choose(rng).unwrap(), EATERIES.choose(rng).unwrap()),
                    vec![c.to_string()],
                    Money::from_yuan(rng.gen_range(20..=150)),
                )
            };
            restaurants.push(Poi {
                id: rid.clone(),
                city_id: city.id.clone(),
                name: unique_name(&mut used_names, format!("{name} ({} Branch)", city.name)),
                coords: offset(rng, coords, 0.2, 2.0),
                open_window: OpenWindow { open: 390 + 15 * rng.gen_range(0..=2), close: 1290 + 30 * rng.gen_range(0..=3) },
                rating: round1(rng.gen_range(3.0..=5.0)),
                avg_cost: cost,
                indoor: true,
                reviews: reviews(rng),
                image_refs: vec![format!("img://{rid}/1")],
                phone: None,
                detail: PoiDetail::Restaurant(RestaurantDetail { cuisine }),
            });
        }

        for h in 0..cfg.hotels_per_attraction {
            let hotel_type = match h % 3 {
                0 => HotelType::Chain,
                1 => HotelType::Upscale,
                _ => HotelType::Other,
            };
            let (lo, hi) = match hotel_type {
                HotelType::Chain => (150, 400),
                HotelType::Upscale => (500, 1500),
                HotelType::Other => (100, 300),
            };
            let base = rng.gen_range(lo..=hi);
            let mut rooms = vec![Room { room_name: "Standard Room".into(), nightly_price: Money::from_yuan(base) }];
            if rng.gen_bool(0.6) {
                rooms.push(Room { room_name: "Deluxe Twin Room".into(), nightly_price: Money::from_yuan(base * 3 / 2) });
            }
            let hid = PoiId(format!("{}-h{:03}", city.id, hotels.len() + 1));
            hotels.push(Poi {
                id: hid.clone(),
                city_id: city.id.clone(),
                name: unique_name(
                    &mut used_names,
                    format!("{} {} ({} Branch)", ADJECTIVES.choose(rng).unwrap(), HOTEL_WORDS.choose(rng).unwrap(), city.name),
                ),
                coords: offset(rng, coords, 0.3, 2.5),
                open_window: OpenWindow::ALL_DAY,
                rating: round1(rng.gen_range(3.0..=5.0)),
                avg_cost: Money::from_yuan(base),
                indoor: true,
                reviews: reviews(rng),
                image_refs: vec![format!("img://{hid}/1")],
                phone: None,
                detail: PoiDetail::Hotel(HotelDetail { hotel_type, rooms }),
            });
        }
    }

    // Link each attraction to its closest neighbours and rank must-visits.
    let mut by_rating: Vec<(f64, PoiId)> = attractions.iter().map(|a| (a.rating, a.id.clone())).collect();
    by_rating.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    for attraction in &mut attractions {
        let n_rest = rng.gen_range(MIN_NEARBY..=MAX_NEARBY);
        let n_hotel = rng.gen_range(MIN_NEARBY..=MAX_NEARBY);
        let rank = by_rating.iter().position(|(_, id)| *id == attraction.id).map(|p| p as u32 + 1);
        let at = attraction.coords;
        let PoiDetail::Attraction(detail) = &mut attraction.detail else { unreachable!() };
        detail.nearby_restaurants = closest(&restaurants, at, n_rest);
        detail.nearby_hotels = closest(&hotels, at, n_hotel);
        detail.must_visit_rank = rank.filter(|r| *r <= 3);
    }

    let mut out = Vec::new();
    out.extend(attractions.into_iter().map(|p| (Domain::Attractions, Sourced::detached(p))));
    out.extend(restaurants.into_iter().map(|p| (Domain::Restaurants, Sourced::detached(p))));
    out.extend(hotels.into_iter().map(|p| (Domain::Hotels, Sourced::detached(p))));
    out
}

fn closest(pool: &[Poi], from: Coords, n: usize) -> Vec<NearbyPoi> {
    let mut ranked: Vec<NearbyPoi> =
        pool.iter().map(|p| NearbyPoi { poi: p.id.clone(), distance_km: geo::rounded_km(from, p.coords) }).collect();
    ranked.sort_by(|a, b| a.distance_km.total_cmp(&b.distance_km).then_with(|| a.poi.cmp(&b.poi)));
    ranked.truncate(n);
    ranked
}

/// Four services per ordered city pair: an early and an evening high-speed
/// train, a midday rail or transfer service, and a late train that may run
/// overnight.
fn gen_links(rng: &mut ChaCha8Rng, cities: &[City]) -> Vec<Sourced<TransportLink>> {
    let mut links = Vec::new();
    for from in cities {
        for to in cities {
            if from.id == to.id {
                continue;
            }
            let km = geo::haversine_km(from.coords, to.coords);
            let hsr_minutes = (km / 250.0 * 60.0).round() as u16 + 20;
            let rail_minutes = (km / 120.0 * 60.0).round() as u16 + 30;
            let slots = [
                (TransportMode::HighSpeedRail, 360 + 5 * rng.gen_range(0..=9), hsr_minutes, 0.45),
                (
                    if rng.gen_bool(0.5) { TransportMode::Rail } else { TransportMode::TransferChain },
                    600 + 5 * rng.gen_range(0..=48),
                    rail_minutes,
                    0.25,
                ),
                (TransportMode::HighSpeedRail, 1140 + 5 * rng.gen_range(0..=9), hsr_minutes, 0.45),
                (TransportMode::Rail, 1290 + 5 * rng.gen_range(0..=12), rail_minutes, 0.22),
            ];
            for (k, (mode, depart, duration, rate)) in slots.into_iter().enumerate() {
                let jitter = rng.gen_range(90..=120) as f64 / 100.0;
                let half_yuan = ((km * rate * jitter) * 2.0).round().max(2.0) as i64;
                let total = u32::from(depart) + u32::from(duration);
                let prefix = match mode {
                    TransportMode::HighSpeedRail => "G",
                    TransportMode::Rail => "K",
                    TransportMode::TransferChain => "T",
                };
                links.push(Sourced::detached(TransportLink {
                    id: LinkId(format!("{}-{}-{}", from.id, to.id, k + 1)),
                    from_city: from.id.clone(),
                    to_city: to.id.clone(),
                    from_station: format!("{} {}", from.name, if k % 2 == 0 { "East" } else { "Central" }),
                    to_station: format!("{} {}", to.name, if k % 2 == 0 { "East" } else { "Central" }),
                    number: format!("{prefix}{}", rng.gen_range(100..=9999)),
                    mode,
                    depart,
                    arrive: (total % 1440) as u16,
                    duration_min: duration,
                    price: Money::from_fen(half_yuan * 50),
                    day_offset: (total / 1440) as u8,
                }));
            }
        }
    }
    links
}

fn gen_weather(rng: &mut ChaCha8Rng, cfg: &SynthConfig, cities: &[City]) -> Vec<Sourced<WeatherRecord>> {
    // Monthly mean highs; no trigonometry so output is bit-stable everywhere.
    const MONTH_HIGH: [i32; 12] = [6, 9, 14, 20, 26, 30, 33, 32, 28, 22, 15, 9];
    let mut out = Vec::new();
    for city in cities {
        for d in 0..cfg.weather_days {
            let date = cfg.weather_start + Duration::days(i64::from(d));
            let high = MONTH_HIGH[date.month0() as usize] + rng.gen_range(-3..=3);
            let low = high - rng.gen_range(5..=10);
            let roll: u32 = rng.gen_range(0..100);
            let condition = match roll {
                0..=34 => WeatherCondition::Sunny,
                35..=64 => WeatherCondition::Cloudy,
                65..=89 => WeatherCondition::Rain,
                90..=94 if low <= 0 => WeatherCondition::Snow,
                _ => WeatherCondition::Other,
            };
            out.push(Sourced::detached(WeatherRecord {
                city_id: city.id.clone(),
                date,
                high_c: f64::from(high),
                low_c: f64::from(low),
                condition,
                wind: format!("{} wind level {}", WINDS.choose(rng).unwrap(), rng.gen_range(1..=4)),
                aqi: rng.gen_range(20..=180),
            }));
        }
    }
    out
}
