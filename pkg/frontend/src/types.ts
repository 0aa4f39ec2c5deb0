/**
 * JSON payloads exchanged with the translation gateway.
 *
 * These mirror the server schemas field for field. The UI never derives
 * values of its own (confidence, vote counts, formula strings); it only
 * displays what the gateway sent.
 */

export interface SessionSettings {
  backendId: string;
  templateId: string;
  temperature: number;
  runs: number;
}

export interface SubTranslationEntry {
  fragment: string;
  fragmentHash: string;
  formulaText: string;
  origin: string;
  locked: boolean;
  confidence: number | null;
}

/** One voted formula: `formula` is the canonical spelling used as the vote key. */
export interface Candidate {
  formula: string;
  text: string;
  votes: number;
  confidence: number;
}

export interface FragmentScores {
  fragment: string;
  best: Candidate;
  alternatives: Candidate[];
}

export interface TranslationResult {
  final: Candidate;
  finalAlternatives: Candidate[];
  subTranslations: FragmentScores[];
  runs: number;
  parsedCount: number;
}

export interface HistoryEntry {
  timestamp: string;
  action: string;
  params: Record<string, unknown>;
  snapshot: Record<string, unknown>;
}

export type SessionStatus = "draft" | "translated" | "approved";

export interface SessionJson {
  id: string;
  nl: string;
  subTranslations: SubTranslationEntry[];
  settings: SessionSettings;
  status: SessionStatus;
  lastResult: TranslationResult | null;
  version: number;
  history: HistoryEntry[];
}

export interface ApiErrorBody {
  error: {
    code: string;
    message: string;
    detail?: Record<string, unknown> | null;
  };
}

export interface TemplateInfo {
  id: string;
  exampleCount: number;
  stopToken: string;
}

export interface BackendInfo {
  id: string;
  name: string;
  kind: string;
  credentialEnv: string | null;
}

/** Projection of a session onto the three page views. Values are copied, never computed. */
export interface ViewModel {
  promptView: PromptView;
  subTranslationView: SubTranslationRow[];
  finalView: FinalView | null;
}

export interface PromptView {
  nl: string;
  backendId: string;
  templateId: string;
  temperature: number;
  runs: number;
}

export interface SubTranslationRow {
  fragment: string;
  fragmentHash: string;
  formulaText: string;
  confidence: number | null;
  alternatives: Candidate[];
  locked: boolean;
}

export interface FinalView {
  formulaText: string;
  confidence: number;
  alternatives: Candidate[];
  approved: boolean;
}
