/** Typed mirror of the planning API payloads. */

export type OptionKey = 'min_cost' | 'better_hotel' | 'better_flight';

export const OPTION_KEYS: OptionKey[] = ['min_cost', 'better_hotel', 'better_flight'];

export const OPTION_TITLES: Record<OptionKey, string> = {
  min_cost: 'Minimum Cost',
  better_hotel: 'Better Hotel',
  better_flight: 'Better Flight',
};

export interface FlightJson {
  id: string;
  origin: string;
  destination: string;
  departure: string;
  arrival: string;
  price: number;
  cabin_class: string;
  is_basic_economy: boolean;
  is_mixed_cabin: boolean;
  is_nonstop: boolean;
  airline: string;
  plane_type: string;
  refundable: boolean;
}

export interface HotelJson {
  id: string;
  city: string;
  name: string;
  brand: string;
  rating: number;
  price_per_night: number;
  earliest_checkin: string;
  latest_checkout: string;
  available_dates: { start: string; end: string };
}

export interface CostJson {
  flight_total: number;
  hotel_total: number;
  grand_total: number;
  soft_penalty: number;
}

export interface ItineraryJson {
  chosen_flights: { leg: number; flight: FlightJson }[];
  chosen_hotels: { hotel: HotelJson; first_night: string; last_night: string }[];
  cost: CostJson;
  timeline?: {
    segments: { from_slot: number; to_slot: number; location: string }[];
    sleep_slots: number[];
    event_slots: number[];
  };
}

export interface PlanOption {
  status: string;
  feasible: boolean;
  solver_stats: Record<string, number>;
  itinerary?: ItineraryJson;
  cost?: CostJson;
  objective?: number;
  reason?: string;
}

export interface PlanResponse {
  session_id: string;
  request_echo: Record<string, unknown>;
  options: Record<OptionKey, PlanOption>;
  timings: { translate_s: number; total_s: number };
}

export interface SelectAck {
  session_id: string;
  option: string;
  selected_at: string;
}

export interface ChatMessage {
  role: 'user' | 'system' | 'error';
  text: string;
}

/** Client-side session state: history, latest plan, current selection. */
export interface SessionView {
  messages: ChatMessage[];
  current: PlanResponse | null;
  selectedKey: OptionKey | null;
  pending: boolean;
  inputText: string;
}
