#!/usr/bin/env python3
"""Regenerates the scenario corpus under scenarios/.

Every scenario gets a scripted policy in scenarios/policies/<id>.jsonl. Router
entries are keyed on markers that show up both in the state summaries written
by the state-manager entries and in the raw observations, so the same policy
drives every engine. Router and state-manager entries are both written latest
stage first because the first matching entry wins, and a later observation can
echo an earlier marker in its arguments.
"""

import argparse
import json
import os

PROPOSAL = "[ACTION PROPOSAL]"
STATE_UPDATE = "[STATE UPDATE]"
SPECIAL = set("\\.^$|?*+()[]{}")


def rx(s):
    return "".join("\\" + c if c in SPECIAL else c for c in s)


def router_entry(markers, action):
    pattern = "^" + rx(PROPOSAL) + "".join("(?=[\\s\\S]*%s)" % rx(m) for m in markers)
    return {"match": pattern, "response": json.dumps(action, ensure_ascii=False), "is_regex": True}


def state_entry(marker, response):
    pattern = "^" + rx(STATE_UPDATE) + "[\\s\\S]*Latest observation:[\\s\\S]*" + rx(marker)
    return {"match": pattern, "response": json.dumps(response, ensure_ascii=False), "is_regex": True}


def call(tool, thought, **args):
    return {"thought": thought, "action": tool, "args": args}


def finish(answer, thought="I have everything needed to answer."):
    return {"thought": thought, "action": "Finish", "args": {"Answer": answer}}


def ok(summary):
    return {"verdict": "Success", "summary": summary}


def bad(reason):
    return {"verdict": "Failure", "reason": reason}


def tool(name, description, *params):
    return {
        "name": name,
        "description": description,
        "params": [
            {"name": p[0], "type": p[1], "required": p[2], "description": p[3]} for p in params
        ],
    }


def success(payload, repeat="forever"):
    return {"kind": "success", "payload": payload, "repeat": repeat}


def error(code, message, repeat="forever"):
    return {"kind": "error", "code": code, "message": message, "repeat": repeat}


def verbose(payload, filler_chars, repeat="forever"):
    return {"kind": "verbose", "payload": payload, "filler_chars": filler_chars, "repeat": repeat}


def timeout(repeat="forever"):
    return {"kind": "timeout", "repeat": repeat}


CITY = ("city", "string", True, "City name")

WEATHER = tool("get_weather", "Current weather forecast for a city", CITY)
FLIGHTS = tool(
    "search_flights",
    "Search flights between two airports on a date",
    ("origin", "string", True, "Departure airport code"),
    ("destination", "string", True, "Arrival airport code"),
    ("date", "string", True, "Travel date, YYYY-MM-DD"),
)
STOCK = tool("stock_quote", "Latest stock price for a ticker symbol", ("symbol", "string", True, "Ticker"))


# Each stage is (markers, action): the action fires once every marker is in
# the proposal prompt. Stages are listed in the order the episode reaches them.
SUITE = [
    {
        "id": "weather_miami",
        "subset": "single-tool",
        "instruction": "What's the weather like in Miami today?",
        "tools": [WEATHER],
        "behaviors": {"get_weather": [success("Miami forecast: sunny, 29C, light sea breeze")]},
        "stages": [
            ([], call("get_weather", "Look up the Miami forecast.", city="Miami")),
            (["sunny, 29C"], finish("It is sunny and 29C in Miami today.")),
        ],
        "states": [("sunny, 29C", ok("Miami weather: sunny, 29C"))],
        "pass": {"contains_all": ["sunny", "29"]},
    },
    {
        "id": "currency_usd_eur",
        "subset": "single-tool",
        "instruction": "How many euros do I get for 100 US dollars?",
        "tools": [
            tool(
                "convert_currency",
                "Convert an amount between two currencies",
                ("amount", "number", True, "Amount to convert"),
                ("from", "string", True, "Source currency code"),
                ("to", "string", True, "Target currency code"),
            )
        ],
        "behaviors": {"convert_currency": [success("100 USD = 92.40 EUR (rate 0.924, mid-market)")]},
        "stages": [
            ([], call("convert_currency", "Convert USD to EUR.", amount=100, **{"from": "USD", "to": "EUR"})),
            (["92.40 EUR"], finish("100 US dollars is about 92.40 EUR.")),
        ],
        "states": [("92.40 EUR", ok("100 USD converts to 92.40 EUR"))],
        "pass": {"contains_all": ["92.40"]},
    },
    {
        "id": "stock_acme",
        "subset": "single-tool",
        "instruction": "What is ACME Corp trading at right now?",
        "tools": [STOCK],
        "behaviors": {"stock_quote": [success("ACME last trade 187.25 USD, +1.3% on the day")]},
        "stages": [
            ([], call("stock_quote", "Get the ACME quote.", symbol="ACME")),
            (["187.25"], finish("ACME is trading at 187.25 USD, up 1.3% today.")),
        ],
        "states": [("187.25", ok("ACME price 187.25 USD (+1.3%)"))],
        "pass": {"regex": "187\\.25"},
    },
    {
        "id": "translate_hello",
        "subset": "single-tool",
        "instruction": "Translate 'Hello, how are you?' into Spanish.",
        "tools": [
            tool(
                "translate",
                "Translate text into a target language",
                ("text", "string", True, "Text to translate"),
                ("target_lang", "string", True, "ISO language code"),
            )
        ],
        "behaviors": {"translate": [success("Translation (es): Hola, ¿cómo estás?")]},
        "stages": [
            ([], call("translate", "Translate to Spanish.", text="Hello, how are you?", target_lang="es")),
            (["Hola, ¿cómo estás?"], finish("In Spanish: Hola, ¿cómo estás?")),
        ],
        "states": [("Hola, ¿cómo estás?", ok("Spanish translation: Hola, ¿cómo estás?"))],
        "pass": {"contains_all": ["Hola, ¿cómo estás?"]},
    },
    {
        "id": "timezone_tokyo",
        "subset": "single-tool",
        "instruction": "What time is it in Tokyo?",
        "tools": [tool("world_time", "Current local time in a city", CITY)],
        "behaviors": {"world_time": [success("Tokyo local time 21:40 JST (UTC+9)")]},
        "stages": [
            ([], call("world_time", "Check the clock in Tokyo.", city="Tokyo")),
            (["21:40 JST"], finish("It is 21:40 JST in Tokyo.")),
        ],
        "states": [("21:40 JST", ok("Tokyo time is 21:40 JST"))],
        "pass": {"exact": "It is 21:40 JST in Tokyo."},
    },
    {
        "id": "gcc_version",
        "subset": "single-tool",
        "instruction": "Which is the latest stable release of the GCC compiler?",
        "tools": [tool("package_info", "Release information for a software package", ("name", "string", True, "Package name"))],
        "behaviors": {"package_info": [success("gcc: latest stable release 14.2, released 2024-08-01")]},
        "stages": [
            ([], call("package_info", "Look up gcc releases.", name="gcc")),
            (["release 14.2"], finish("The latest stable GCC release is 14.2.")),
        ],
        "states": [("release 14.2", ok("gcc latest stable release 14.2"))],
        "pass": {"contains_all": ["14.2"]},
    },
    {
        "id": "trip_orlando",
        "subset": "multi-tool",
        "instruction": "I'm flying from New York to Orlando on 2024-07-12. What's the weather there and the cheapest flight?",
        "tools": [WEATHER, FLIGHTS],
        "behaviors": {
            "get_weather": [success("Orlando forecast: 31C, thunderstorms after 3pm")],
            "search_flights": [success("Cheapest: FL220 JFK->MCO 09:15 for $189")],
        },
        "stages": [
            ([], call("get_weather", "Weather first.", city="Orlando")),
            (["31C"], call("search_flights", "Now the flights.", origin="JFK", destination="MCO", date="2024-07-12")),
            (["31C", "FL220"], finish("Orlando will be 31C with afternoon storms; the cheapest flight is FL220 at 09:15 for $189.")),
        ],
        "states": [
            ("31C, thunderstorms", ok("Orlando: 31C, storms after 3pm")),
            ("FL220", ok("Cheapest flight FL220 JFK->MCO 09:15, $189")),
        ],
        "pass": {"contains_all": ["31C", "FL220", "189"]},
    },
    {
        "id": "recipe_nutrition",
        "subset": "multi-tool",
        "instruction": "Find me a lentil soup recipe and tell me how many calories a serving has.",
        "tools": [
            tool("find_recipe", "Search recipes by dish name", ("dish", "string", True, "Dish name")),
            tool("nutrition_facts", "Nutrition facts for a recipe id", ("recipe_id", "string", True, "Recipe id")),
        ],
        "behaviors": {
            "find_recipe": [success("Recipe R-881 'Red lentil soup', 35 minutes, serves 4")],
            "nutrition_facts": [success("R-881 nutrition: 320 kcal per serving, 18g protein")],
        },
        "stages": [
            ([], call("find_recipe", "Find the recipe.", dish="lentil soup")),
            (["R-881"], call("nutrition_facts", "Get its nutrition.", recipe_id="R-881")),
            (["R-881", "320 kcal"], finish("Try 'Red lentil soup' (R-881): 320 kcal per serving.")),
        ],
        "states": [
            ("'Red lentil soup'", ok("Recipe R-881 Red lentil soup, serves 4")),
            ("320 kcal", ok("R-881 has 320 kcal per serving")),
        ],
        "pass": {"contains_all": ["320 kcal"]},
    },
    {
        "id": "showtimes_dune",
        "subset": "multi-tool",
        "instruction": "When is Dune showing tonight in Austin?",
        "tools": [
            tool("movie_search", "Find a movie id by title", ("title", "string", True, "Movie title")),
            tool("showtimes", "Showtimes for a movie in a city", ("movie_id", "string", True, "Movie id"), CITY),
        ],
        "behaviors": {
            "movie_search": [success("Match: M-5521 Dune: Part Two (2024)")],
            "showtimes": [success("M-5521 in Austin tonight: 19:30 and 22:10 at Alamo South")],
        },
        "stages": [
            ([], call("movie_search", "Resolve the movie.", title="Dune")),
            (["M-5521"], call("showtimes", "Get showtimes.", movie_id="M-5521", city="Austin")),
            (["M-5521", "19:30"], finish("Dune: Part Two plays tonight in Austin at 19:30 and 22:10 (Alamo South).")),
        ],
        "states": [
            ("Match: M-5521", ok("Dune is movie M-5521")),
            ("19:30", ok("M-5521 Austin showtimes 19:30, 22:10 at Alamo South")),
        ],
        "pass": {"contains_all": ["19:30", "22:10"]},
    },
    {
        "id": "paris_hotel",
        "subset": "multi-tool",
        "instruction": "Find a well-rated hotel near the Eiffel Tower and tell me its price and rating.",
        "tools": [
            tool("geocode", "Coordinates for a place name", ("place", "string", True, "Place name")),
            tool("hotel_search", "Hotels near coordinates", ("lat", "number", True, "Latitude"), ("lon", "number", True, "Longitude")),
            tool("hotel_reviews", "Review summary for a hotel", ("hotel", "string", True, "Hotel name")),
        ],
        "behaviors": {
            "geocode": [success("Eiffel Tower coordinates 48.8584,2.2945")],
            "hotel_search": [success("Nearest: Hotel Lumiere, 120 EUR/night, 300 m away")],
            "hotel_reviews": [success("Hotel Lumiere guest rating 4.6/5 from 2,310 reviews")],
        },
        "stages": [
            ([], call("geocode", "Locate the tower.", place="Eiffel Tower")),
            (["48.8584"], call("hotel_search", "Search nearby.", lat=48.8584, lon=2.2945)),
            (["48.8584", "Hotel Lumiere"], call("hotel_reviews", "Check reviews.", hotel="Hotel Lumiere")),
            (["Hotel Lumiere", "4.6/5"], finish("Hotel Lumiere, 300 m from the Eiffel Tower: 120 EUR/night, rated 4.6/5.")),
        ],
        "states": [
            ("48.8584", ok("Eiffel Tower at 48.8584,2.2945")),
            ("120 EUR/night", ok("Hotel Lumiere 120 EUR/night, 300 m away")),
            ("4.6/5", ok("Hotel Lumiere rated 4.6/5")),
        ],
        "pass": {"contains_all": ["Hotel Lumiere", "120 EUR", "4.6"]},
    },
    {
        "id": "retry_after_500",
        "subset": "recovery",
        "instruction": "What's the weather in Denver?",
        "tools": [WEATHER],
        "behaviors": {
            "get_weather": [
                error(500, "upstream timeout in weather service", repeat="once"),
                success("Denver forecast: light snow, -3C"),
            ]
        },
        "stages": [
            ([], call("get_weather", "Look up Denver.", city="Denver")),
            (["upstream timeout"], call("get_weather", "The last call failed; retry with a more specific city.", city="Denver, CO")),
            (["-3C"], finish("Denver has light snow and -3C.")),
        ],
        "states": [
            ("upstream timeout", bad("weather service returned 500 (upstream timeout); retry with a more specific city")),
            ("-3C", ok("Denver: light snow, -3C")),
        ],
        "pass": {"contains_all": ["-3C", "snow"]},
    },
    {
        "id": "backup_rates",
        "subset": "recovery",
        "instruction": "What is the GBP to JPY exchange rate?",
        "tools": [
            tool("primary_rates", "Exchange rates from the primary provider", ("pair", "string", True, "Currency pair")),
            tool("backup_rates", "Exchange rates from the backup provider", ("pair", "string", True, "Currency pair")),
        ],
        "behaviors": {
            "primary_rates": [error(503, "rates service unavailable")],
            "backup_rates": [success("GBP/JPY 191.37 (backup provider, delayed 5 min)")],
        },
        "stages": [
            ([], call("primary_rates", "Try the primary provider.", pair="GBPJPY")),
            (["rates service unavailable"], call("backup_rates", "Primary is down; use the backup.", pair="GBPJPY")),
            (["191.37"], finish("GBP/JPY is 191.37 (slightly delayed quote).")),
        ],
        "states": [
            ("rates service unavailable", bad("rates service unavailable (503) on primary_rates; use backup_rates")),
            ("191.37", ok("GBP/JPY 191.37")),
        ],
        "pass": {"contains_all": ["191.37"]},
    },
    {
        "id": "missing_date",
        "subset": "recovery",
        "instruction": "Find a flight from Boston to Chicago on 2024-09-03.",
        "tools": [FLIGHTS],
        "behaviors": {"search_flights": [success("Cheapest: FL480 BOS->ORD 11:20 for $142")]},
        "stages": [
            ([], call("search_flights", "Search flights.", origin="BOS", destination="ORD")),
            (["missing required parameter: date"], call("search_flights", "Add the date.", origin="BOS", destination="ORD", date="2024-09-03")),
            (["FL480"], finish("FL480 leaves Boston at 11:20 for Chicago, $142.")),
        ],
        "states": [
            ("missing required parameter: date", bad("missing required parameter: date; pass the travel date")),
            ("FL480", ok("Cheapest BOS->ORD flight FL480 11:20, $142")),
        ],
        "pass": {"contains_all": ["FL480"]},
    },
    {
        "id": "timeout_archive",
        "subset": "recovery",
        "instruction": "What did the city council decide about the new tram line?",
        "tools": [
            tool("news_search", "Live news search", ("query", "string", True, "Search query")),
            tool("news_archive", "Archived news articles", ("query", "string", True, "Search query")),
        ],
        "behaviors": {
            "news_search": [timeout()],
            "news_archive": [success("Archive: council approved tram line 4 on a 9-2 vote")],
        },
        "stages": [
            ([], call("news_search", "Search the news.", query="city council tram line")),
            (["no response within 15000 ms"], call("news_archive", "Live search timed out; try the archive.", query="city council tram line")),
            (["9-2 vote"], finish("The council approved tram line 4 on a 9-2 vote.")),
        ],
        "states": [
            ("no response within 15000 ms", bad("news_search gave no response within 15000 ms; use news_archive")),
            ("9-2 vote", ok("Council approved tram line 4, 9-2 vote")),
        ],
        "pass": {"contains_all": ["approved", "9-2"]},
    },
    {
        "id": "irrelevant_then_refined",
        "subset": "recovery",
        "instruction": "How much does a ThinkPad X1 Carbon laptop cost?",
        "tools": [tool("product_search", "Search products in the store", ("query", "string", True, "Search query"))],
        "behaviors": {
            "product_search": [
                success("Top result: garden hose 15m, 24.99 USD", repeat="once"),
                success("Top result: ThinkPad X1 Carbon Gen 12, 1299 USD"),
            ]
        },
        "stages": [
            ([], call("product_search", "Search the store.", query="X1")),
            (["garden hose"], call("product_search", "Refine the query.", query="ThinkPad X1 Carbon laptop")),
            (["1299 USD"], finish("The ThinkPad X1 Carbon costs 1299 USD.")),
        ],
        "states": [
            ("garden hose", bad("results were about a garden hose, not the laptop; refine the query")),
            ("1299 USD", ok("ThinkPad X1 Carbon Gen 12 costs 1299 USD")),
        ],
        "pass": {"contains_all": ["1299"]},
    },
    {
        "id": "misspelled_place",
        "subset": "recovery",
        "instruction": "What are the coordinates of Springfield, Illinois?",
        "tools": [tool("geocode", "Coordinates for a place name", ("place", "string", True, "Place name"))],
        "behaviors": {
            "geocode": [
                error(404, "place not found: Sprngfield", repeat="once"),
                success("Springfield, IL coordinates 39.7817,-89.6501"),
            ]
        },
        "stages": [
            ([], call("geocode", "Geocode it.", place="Sprngfield")),
            (["place not found"], call("geocode", "Fix the spelling.", place="Springfield, IL")),
            (["39.7817"], finish("Springfield, Illinois is at 39.7817, -89.6501.")),
        ],
        "states": [
            ("place not found", bad("place not found (404): the place name is misspelled")),
            ("39.7817", ok("Springfield IL at 39.7817,-89.6501")),
        ],
        "pass": {"contains_all": ["39.7817"]},
    },
    {
        "id": "two_failures_then_third",
        "subset": "recovery",
        "instruction": "Get me today's top headline.",
        "tools": [
            tool("wire_feed", "Headlines from the wire service", ("region", "string", False, "Region")),
            tool("paper_feed", "Headlines from the newspaper API", ("region", "string", False, "Region")),
            tool("rss_reader", "Headlines from public RSS", ("region", "string", False, "Region")),
        ],
        "behaviors": {
            "wire_feed": [error(500, "wire service crashed")],
            "paper_feed": [error(403, "paper API key expired")],
            "rss_reader": [success("Top headline: Solar farm opens in the desert, powering 80,000 homes")],
        },
        "stages": [
            ([], call("wire_feed", "Try the wire.")),
            (["wire service crashed"], call("paper_feed", "Wire failed; try the paper.")),
            (["wire service crashed", "paper API key expired"], call("rss_reader", "Both failed; use RSS.")),
            (["80,000 homes"], finish("Top headline: a solar farm opened in the desert, powering 80,000 homes.")),
        ],
        "states": [
            ("wire service crashed", bad("wire service crashed (500); do not retry wire_feed")),
            ("paper API key expired", bad("paper API key expired (403); paper_feed unusable")),
            ("80,000 homes", ok("Headline: solar farm opens, powers 80,000 homes")),
        ],
        "pass": {"contains_all": ["solar", "80,000"]},
    },
    {
        "id": "verbose_flight",
        "subset": "noisy",
        "instruction": "Find the cheapest morning flight from SFO to Seattle on 2024-10-02.",
        "tools": [FLIGHTS],
        "behaviors": {"search_flights": [verbose("Best option: flight UA123 departs 07:05, fare $240", 8000)]},
        "stages": [
            ([], call("search_flights", "Search flights.", origin="SFO", destination="SEA", date="2024-10-02")),
            (["UA123"], finish("UA123 departs at 07:05 for $240.")),
        ],
        "states": [("UA123", ok("Cheapest morning flight UA123 07:05, $240"))],
        "pass": {"contains_all": ["UA123", "240"]},
    },
    {
        "id": "verbose_news",
        "subset": "noisy",
        "instruction": "Did the central bank change its interest rate today?",
        "tools": [tool("news_search", "Live news search", ("query", "string", True, "Search query"))],
        "behaviors": {"news_search": [verbose("Headline: central bank holds rate at 4.25%", 5000)]},
        "stages": [
            ([], call("news_search", "Search for the rate decision.", query="central bank rate decision")),
            (["4.25%"], finish("No, the central bank held its rate at 4.25%.")),
        ],
        "states": [("4.25%", ok("Central bank held rate at 4.25%"))],
        "pass": {"contains_all": ["4.25%"]},
    },
    {
        "id": "verbose_then_quote",
        "subset": "noisy",
        "instruction": "What is the share price of the company Novexa?",
        "tools": [
            tool("company_lookup", "Company profile search", ("name", "string", True, "Company name")),
            STOCK,
        ],
        "behaviors": {
            "company_lookup": [verbose("Novexa Holdings trades under ticker NVXA on NASDAQ", 6000)],
            "stock_quote": [success("NVXA last trade 54.10 USD")],
        },
        "stages": [
            ([], call("company_lookup", "Find the ticker.", name="Novexa")),
            (["ticker NVXA"], call("stock_quote", "Quote the ticker.", symbol="NVXA")),
            (["54.10 USD"], finish("Novexa (NVXA) trades at 54.10 USD.")),
        ],
        "states": [
            ("ticker NVXA", ok("Novexa Holdings has ticker NVXA")),
            ("54.10 USD", ok("NVXA price 54.10 USD")),
        ],
        "pass": {"contains_all": ["54.10"]},
    },
    {
        "id": "router_reask",
        "subset": "noisy",
        "instruction": "What's the weather in Paris?",
        "tools": [WEATHER],
        "behaviors": {"get_weather": [success("Paris forecast: overcast, 14C")]},
        "stages": [
            ([], "I should probably look at the weather service first."),
            (["could not be parsed"], call("get_weather", "Reply in the required format this time.", city="Paris")),
            (["overcast, 14C"], finish("Paris is overcast at 14C.")),
        ],
        "states": [("overcast, 14C", ok("Paris: overcast, 14C"))],
        "pass": {"contains_all": ["14C"]},
    },
    {
        "id": "state_fallback",
        "subset": "noisy",
        "instruction": "What's the weather in Berlin?",
        "tools": [WEATHER],
        "behaviors": {"get_weather": [success("Berlin forecast: cloudy, 12C, wind 20 km/h")]},
        "stages": [
            ([], call("get_weather", "Look up Berlin.", city="Berlin")),
            (["cloudy, 12C"], finish("Berlin is cloudy at 12C.")),
        ],
        # The state manager never answers in the expected format, so the
        # mechanical fallback records the payload prefix.
        "states": [("Berlin forecast", "Looks fine to me.")],
        "pass": {"contains_all": ["12C"]},
    },
]


def long_horizon(idx, code, pages, filler, topic):
    sid = "long_horizon_%d" % idx
    stages = [([], call("get_access_code", "Fetch the access code first.", report=topic))]
    stages.append(([code], call("read_page", "Start reading.", page=1)))
    for k in range(1, pages):
        stages.append((["page %d of %d complete" % (k, pages)], call("read_page", "Next page.", page=k + 1)))
    last = "page %d of %d complete" % (pages, pages)
    stages.append(([last], finish("Access code unknown; read %d pages." % pages, "The code is not in view.")))
    stages.append(([last, code], finish("Access code %s; read %d pages." % (code, pages))))
    states = [("Access code: " + code, ok("Access code for the %s report is %s" % (topic, code)))]
    for k in range(1, pages + 1):
        states.append(("[page %d of %d complete]" % (k, pages),
                       ok("Read %s report [page %d of %d complete]" % (topic, k, pages))))
    behaviors = [
        verbose("%s report page %d: figures reviewed [page %d of %d complete]" % (topic, k, k, pages), filler,
                repeat="once" if k < pages else "forever")
        for k in range(1, pages + 1)
    ]
    return {
        "id": sid,
        "subset": "long-horizon",
        "instruction": "Get the access code for the %s report, read all of its pages with read_page, "
        "then reply with the access code and how many pages you read." % topic,
        "tools": [
            tool("get_access_code", "Access code for a report", ("report", "string", True, "Report name")),
            tool("read_page", "Read one page of the current report", ("page", "integer", True, "Page number")),
        ],
        "behaviors": {
            "get_access_code": [success("Access code: %s (keep it for the final reply)" % code)],
            "read_page": behaviors,
        },
        "stages": stages,
        "states": states,
        "pass": {"contains_all": [code, "%d pages" % pages]},
    }


LONG_HORIZON = [
    long_horizon(1, "ZX-4411", 6, 1500, "quarterly sales"),
    long_horizon(2, "QK-7302", 6, 1800, "safety audit"),
    long_horizon(3, "MB-1958", 7, 1400, "fleet maintenance"),
    long_horizon(4, "TR-6620", 8, 1600, "energy usage"),
    long_horizon(5, "LP-3047", 6, 2000, "customer survey"),
]

BACKTRACK = [
    {
        "id": "backtrack_lisbon",
        "subset": "backtrack",
        "instruction": "What is the current temperature in Lisbon?",
        "tools": [
            tool("primary_feed", "Weather from the primary feed", CITY),
            tool("backup_feed", "Weather from the backup feed", CITY),
        ],
        "behaviors": {
            "primary_feed": [error(503, "primary feed offline for maintenance")],
            "backup_feed": [success("Backup feed: Lisbon 24C and clear")],
        },
        "stages": [
            ([], call("primary_feed", "Use the primary feed.", city="Lisbon")),
            (["attempt 2 of"], call("backup_feed", "Try another branch.", city="Lisbon")),
            (["primary feed offline"], call("backup_feed", "The primary feed is down.", city="Lisbon")),
            (["Lisbon 24C"], finish("It is 24C and clear in Lisbon.")),
        ],
        "states": [
            ("primary feed offline", bad("primary feed offline for maintenance (503); use backup_feed")),
            ("Lisbon 24C", ok("Lisbon 24C and clear")),
        ],
        "pass": {"contains_all": ["24C"]},
    }
]


def policy_lines(spec):
    lines = ["# scripted policy for scenario %s (generated by tools/gen_scenarios.py)" % spec["id"]]
    for markers, action in reversed(spec["stages"]):
        if isinstance(action, str):
            entry = router_entry(markers, {})
            entry["response"] = action
        else:
            entry = router_entry(markers, action)
        lines.append(json.dumps(entry, ensure_ascii=False))
    for marker, response in reversed(spec["states"]):
        entry = state_entry(marker, response)
        if isinstance(response, str):
            entry["response"] = response
        lines.append(json.dumps(entry, ensure_ascii=False))
    return lines


def scenario_json(spec):
    return {
        "id": spec["id"],
        "instruction": {"text": spec["instruction"], "subset_label": spec["subset"]},
        "tools": spec["tools"],
        "behaviors": spec["behaviors"],
        "pass_condition": spec["pass"],
        "policy": "../policies/%s.jsonl" % spec["id"],
    }


NEVER_FINISH = [
    {"match": PROPOSAL, "response": json.dumps(call("get_weather", "Check again.", city="Miami"))},
    {"match": STATE_UPDATE, "response": json.dumps(ok("Miami weather: sunny, 29C"))},
]


def write(root):
    policies = os.path.join(root, "policies")
    os.makedirs(policies, exist_ok=True)
    for group, specs in (("suite", SUITE), ("long_horizon", LONG_HORIZON), ("backtrack", BACKTRACK)):
        d = os.path.join(root, group)
        os.makedirs(d, exist_ok=True)
        for spec in specs:
            with open(os.path.join(d, spec["id"] + ".json"), "w", encoding="utf-8") as f:
                json.dump(scenario_json(spec), f, indent=2, ensure_ascii=False)
                f.write("\n")
            with open(os.path.join(policies, spec["id"] + ".jsonl"), "w", encoding="utf-8") as f:
                f.write("\n".join(policy_lines(spec)) + "\n")
    with open(os.path.join(policies, "never_finish.jsonl"), "w", encoding="utf-8") as f:
        f.write("# keeps calling get_weather and never finishes\n")
        for e in NEVER_FINISH:
            f.write(json.dumps(e) + "\n")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--root", default=os.path.join(os.path.dirname(__file__), "..", "scenarios"))
    write(os.path.normpath(parser.parse_args().root))
