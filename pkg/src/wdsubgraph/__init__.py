"""Topic-specific knowledge subgraphs extracted from the Wikidata JSON dump."""

__version__ = "0.1.0"

PRESETS = {
    "animals": "Q16521",
    "companies": "Q4830453",
    "countries": "Q6256",
    "films": "Q11424",
    "humans": "Q5",
}
