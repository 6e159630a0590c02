/**
 * Runtime validation of API payloads. Every response is checked against
 * these schemas before anything is rendered, so a drifting server contract
 * fails loudly at the boundary instead of producing a wrong-looking UI.
 */

import { z } from 'zod';
import type { PlanResponse, SelectAck } from './types';

const costSchema = z.object({
  flight_total: z.number().nonnegative(),
  hotel_total: z.number().nonnegative(),
  grand_total: z.number().nonnegative(),
  soft_penalty: z.number().nonnegative(),
});

const flightSchema = z.object({
  id: z.string(),
  origin: z.string().length(3),
  destination: z.string().length(3),
  departure: z.string(),
  arrival: z.string(),
  price: z.number().positive(),
  cabin_class: z.string(),
  is_basic_economy: z.boolean(),
  is_mixed_cabin: z.boolean(),
  is_nonstop: z.boolean(),
  airline: z.string(),
  plane_type: z.string(),
  refundable: z.boolean(),
});

const hotelSchema = z.object({
  id: z.string(),
  city: z.string().length(3),
  name: z.string(),
  brand: z.string(),
  rating: z.number().min(0).max(5),
  price_per_night: z.number().positive(),
  earliest_checkin: z.string(),
  latest_checkout: z.string(),
  available_dates: z.object({ start: z.string(), end: z.string() }),
});

const itinerarySchema = z.object({
  chosen_flights: z.array(z.object({ leg: z.number().int(), flight: flightSchema })),
  chosen_hotels: z.array(z.object({
    hotel: hotelSchema,
    first_night: z.string(),
    last_night: z.string(),
  })),
  cost: costSchema,
  timeline: z
    .object({
      segments: z.array(z.object({
        from_slot: z.number().int(),
        to_slot: z.number().int(),
        location: z.string(),
      })),
      sleep_slots: z.array(z.number().int()),
      event_slots: z.array(z.number().int()),
    })
    .optional(),
});

const optionSchema = z
  .object({
    status: z.string(),
    feasible: z.boolean(),
    solver_stats: z.record(z.number()),
    itinerary: itinerarySchema.optional(),
    cost: costSchema.optional(),
    objective: z.number().optional(),
    reason: z.string().optional(),
  })
  .refine((option) => !option.feasible || (option.itinerary && option.cost), {
    message: 'feasible options must carry an itinerary and a cost breakdown',
  })
  .refine((option) => option.feasible || option.reason, {
    message: 'infeasible options must carry a reason',
  });

const planResponseSchema = z.object({
  session_id: z.string().min(1),
  request_echo: z.record(z.unknown()),
  options: z.object({
    min_cost: optionSchema,
    better_hotel: optionSchema,
    better_flight: optionSchema,
  }),
  timings: z.object({ translate_s: z.number(), total_s: z.number() }),
});

const selectAckSchema = z.object({
  session_id: z.string(),
  option: z.string(),
  selected_at: z.string(),
});

export function validatePlanResponse(raw: unknown): PlanResponse {
  return planResponseSchema.parse(raw) as PlanResponse;
}

export function validateSelectAck(raw: unknown): SelectAck {
  return selectAckSchema.parse(raw);
}
