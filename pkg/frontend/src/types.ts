export interface Category {
  id: number;
  name: string;
  examples: string[];
}

export interface Assignment {
  compound_id: string;
  head: string;
  preposition: string | null;
  modifier: string;
  categories: Category[];
}

export interface SubmitAck {
  status: string;
  compound_id: string;
  annotator: string;
  category_id: number;
  timestamp: string;
}

export interface Progress {
  total_compounds: number;
  fully_annotated: number;
  per_annotator: Record<string, number>;
}

export function compoundText(assignment: Assignment): string {
  if (assignment.preposition !== null) {
    return `${assignment.head} ${assignment.preposition} ${assignment.modifier}`;
  }
  return `${assignment.head} ${assignment.modifier}`;
}
