/** Wire types, mirroring the API's JSON bodies field for field. */

export type WasteType =
  | "MIXED"
  | "PAPER"
  | "PLASTIC"
  | "GLASS"
  | "METAL"
  | "HAZARDOUS";

export const WASTE_TYPES: WasteType[] = [
  "MIXED",
  "PAPER",
  "PLASTIC",
  "GLASS",
  "METAL",
  "HAZARDOUS",
];

export type Phase = "defined" | "preparation" | "active" | "completed";

export const ICONS = [
  "leaf",
  "tree",
  "recycle",
  "droplet",
  "globe",
  "sun",
  "sprout",
  "bin",
] as const;

export interface GeoPoint {
  lat: number;
  lon: number;
}

export interface PollutedArea {
  area_id: string;
  center: GeoPoint;
  radius_m: number;
  note: string;
}

export interface EventRecord {
  event_id: string;
  name: string;
  icon: string;
  start_time: string;
  end_time: string;
  area_center: GeoPoint;
  area_radius_m: number;
  phase: Phase;
  polluted_areas: PollutedArea[];
  collection_points: GeoPoint[];
}

export interface Quest {
  quest_id: string;
  event_id: string;
  title: string;
  target_type: WasteType | null;
  target_count: number | null;
  area: string | null;
  bonus_points: number;
}

export interface Team {
  team_id: string;
  event_id: string;
  name: string;
  member_ids: string[];
}

export interface ParticipantInfo {
  participant_id: string;
  display_name: string;
  mode: "solo" | "team";
}

export interface RegisteredParticipant extends ParticipantInfo {
  token: string;
}

export interface Participation {
  participant_id: string;
  quest_id: string;
  started_at: string;
  completed_at: string | null;
}

export interface BagRecord {
  bag_id: string;
  event_id: string;
  participant_id: string;
  quest_id: string | null;
  team_id: string | null;
  waste_type: WasteType;
  weight_kg: number | null;
  points: number;
  recorded_at: string;
  source: "app" | "bin";
}

export interface BagClaim {
  bag_id: string;
  participant_id: string;
  waste_type: WasteType;
  quest_id: string | null;
  qr_payload: string;
}

export interface EventView {
  event: EventRecord;
  quests: Quest[];
  teams: Team[];
  participants: ParticipantInfo[];
  participations: Participation[];
  bag_count: number;
}

export interface LeaderboardEntry {
  subject_id: string;
  total_points: number;
  bag_count: number;
  last_scored_at: string | null;
}

export interface Leaderboard {
  scope: "individual" | "team";
  entries: LeaderboardEntry[];
}

export interface EventSummary {
  counts: Record<WasteType, number>;
  weights: Record<WasteType, number>;
  participant_count: number;
  quest_completions: number;
  total_bags: number;
}

export interface ApiErrorBody {
  error: string;
  detail: string;
}
