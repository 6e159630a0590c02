"""The planning service, exercised in-process.

Drives the HTTP API exactly as the chat UI does: health check, a
natural-language /plan request, and a /select on the preferred option.
For a real server run `tripsolve serve --port 8000` instead.
"""

from fastapi.testclient import TestClient

from tripsolve.service import ServiceConfig, create_app

TEXT = ("Flights: coach class; with a total flight budget of $1383; "
        "non-stop flights only; no basic economy; and no mixed cabin. "
        "Hotels: daily budget $317; and total budget $952. "
        "Travel dates: January 15th, 2025, DEN to MIA; "
        "January 17th, 2025, MIA to JFK; and January 18th, 2025, JFK to DEN.")

app = create_app(ServiceConfig(gen_seed=2025))
with TestClient(app) as client:
    print("=== GET /health ===")
    print(client.get("/health").json())

    print("\n=== POST /plan (natural language body) ===")
    print(TEXT, "\n")
    data = client.post("/plan", json={"text": TEXT}).json()
    print(f"session: {data['session_id']}  "
          f"handler time: {data['timings']['total_s']:.2f}s")
    for key, option in data["options"].items():
        if option["feasible"]:
            cost = option["cost"]
            print(f"  {key:13s} flights ${cost['flight_total']}, "
                  f"hotels ${cost['hotel_total']}, total ${cost['grand_total']}")
        else:
            print(f"  {key:13s} infeasible: {option['reason']}")

    print("\n=== POST /select (choose minimum cost) ===")
    ack = client.post("/select", json={"session_id": data["session_id"],
                                       "option": "min_cost"}).json()
    print(ack)
