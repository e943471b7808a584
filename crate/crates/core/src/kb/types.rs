use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::geo::Coords;
use crate::money::Money;

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                $name(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_string())
            }
        }
    };
}

string_id!(
    /// Identifier of a city.
    CityId
);
string_id!(
    /// Identifier of an attraction, restaurant or hotel.
    PoiId
);
string_id!(
    /// Identifier of a scheduled transport service.
    LinkId
);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct City {
    pub id: CityId,
    pub name: String,
    pub coords: Coords,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoiKind {
    Attraction,
    Restaurant,
    Hotel,
}

impl PoiKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PoiKind::Attraction => "attraction",
            PoiKind::Restaurant => "restaurant",
            PoiKind::Hotel => "hotel",
        }
    }
}

/// Daily opening hours in minutes since midnight, `open < close <= 1440`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenWindow {
    pub open: u16,
    pub close: u16,
}

impl OpenWindow {
    pub const ALL_DAY: OpenWindow = OpenWindow { open: 0, close: 1440 };

    pub fn is_valid(&self) -> bool {
        self.open < self.close && self.close <= 1440
    }

    pub fn contains(&self, start: u16, end: u16) -> bool {
        self.open <= start && end <= self.close
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ticket {
    pub label: String,
    pub price: Money,
}

/// A linked neighbour of an attraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearbyPoi {
    pub poi: PoiId,
    pub distance_km: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttractionDetail {
    pub tickets: Vec<Ticket>,
    pub visit_minutes: u16,
    pub nearby_restaurants: Vec<NearbyPoi>,
    pub nearby_hotels: Vec<NearbyPoi>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub must_visit_rank: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub categories: Vec<String>,
}

impl AttractionDetail {
    /// Per-person admission used for costing: the cheapest listed ticket.
    pub fn admission(&self) -> Money {
        self.tickets.iter().map(|t| t.price).min().unwrap_or(Money::ZERO)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct RestaurantDetail {
    #[serde(default)]
    pub cuisine: Vec<String>,
}

impl RestaurantDetail {
    pub fn is_snack_shop(&self) -> bool {
        self.cuisine.iter().any(|c| c == "snack")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HotelType {
    Chain,
    Upscale,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Room {
    pub room_name: String,
    pub nightly_price: Money,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HotelDetail {
    pub hotel_type: HotelType,
    pub rooms: Vec<Room>,
}

impl HotelDetail {
    pub fn cheapest_room(&self) -> Money {
        self.rooms.iter().map(|r| r.nightly_price).min().unwrap_or(Money::ZERO)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PoiDetail {
    Attraction(AttractionDetail),
    Restaurant(RestaurantDetail),
    Hotel(HotelDetail),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poi {
    pub id: PoiId,
    pub city_id: CityId,
    pub name: String,
    pub coords: Coords,
    pub open_window: OpenWindow,
    pub rating: f64,
    pub avg_cost: Money,
    pub indoor: bool,
    #[serde(default)]
    pub reviews: Vec<String>,
    #[serde(default)]
    pub image_refs: Vec<String>,
    /// Contact number, kept verbatim and never read by any operation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phone: Option<String>,
    #[serde(flatten)]
    pub detail: PoiDetail,
}

impl Poi {
    pub fn kind(&self) -> PoiKind {
        match self.detail {
            PoiDetail::Attraction(_) => PoiKind::Attraction,
            PoiDetail::Restaurant(_) => PoiKind::Restaurant,
            PoiDetail::Hotel(_) => PoiKind::Hotel,
        }
    }

    pub fn attraction(&self) -> Option<&AttractionDetail> {
        match &self.detail {
            PoiDetail::Attraction(a) => Some(a),
            _ => None,
        }
    }

    pub fn restaurant(&self) -> Option<&RestaurantDetail> {
        match &self.detail {
            PoiDetail::Restaurant(r) => Some(r),
            _ => None,
        }
    }

    pub fn hotel(&self) -> Option<&HotelDetail> {
        match &self.detail {
            PoiDetail::Hotel(h) => Some(h),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransportMode {
    HighSpeedRail,
    Rail,
    TransferChain,
}

/// A timetabled service. Times are minutes since midnight; `day_offset`
/// counts midnights crossed between departure and arrival.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportLink {
    pub id: LinkId,
    pub from_city: CityId,
    pub to_city: CityId,
    pub from_station: String,
    pub to_station: String,
    pub number: String,
    pub mode: TransportMode,
    pub depart: u16,
    pub arrive: u16,
    pub duration_min: u16,
    pub price: Money,
    #[serde(default)]
    pub day_offset: u8,
}

impl TransportLink {
    pub fn timing_consistent(&self) -> bool {
        let total = u32::from(self.depart) + u32::from(self.duration_min);
        self.depart < 1440
            && self.duration_min > 0
            && u32::from(self.arrive) == total % 1440
            && u32::from(self.day_offset) == total / 1440
    }

    pub fn same_day(&self) -> bool {
        self.day_offset == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeatherCondition {
    Sunny,
    Cloudy,
    Rain,
    Snow,
    Other,
    /// No record for the requested city and date.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeatherRecord {
    pub city_id: CityId,
    pub date: NaiveDate,
    pub high_c: f64,
    pub low_c: f64,
    pub condition: WeatherCondition,
    pub wind: String,
    pub aqi: u32,
}

impl WeatherRecord {
    pub fn unknown(city_id: CityId, date: NaiveDate) -> Self {
        WeatherRecord {
            city_id,
            date,
            high_c: 0.0,
            low_c: 0.0,
            condition: WeatherCondition::Unknown,
            wind: String::new(),
            aqi: 0,
        }
    }

    pub fn is_unknown(&self) -> bool {
        self.condition == WeatherCondition::Unknown
    }
}
